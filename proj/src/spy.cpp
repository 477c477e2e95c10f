#include "sscf/spy.hpp"

#include <sstream>

#include "sscf/util.hpp"

namespace sscf {

std::vector<std::vector<bool>> nonzero_pattern(const MatrixFunction& M,
                                               double threshold, int grid) {
  const auto ts = chebyshev_grid(M.interval(), grid);
  Eigen::MatrixXd sup = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  for (const double t : ts) sup = sup.cwiseMax(M.eval(t).cwiseAbs());
  std::vector<std::vector<bool>> pattern(static_cast<size_t>(M.rows()),
                                         std::vector<bool>(static_cast<size_t>(M.cols()), false));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      pattern[static_cast<size_t>(i)][static_cast<size_t>(j)] = sup(i, j) > threshold;
  return pattern;
}

int pattern_count(const std::vector<std::vector<bool>>& pattern) {
  int n = 0;
  for (const auto& row : pattern)
    for (const bool v : row) n += v ? 1 : 0;
  return n;
}

std::vector<std::vector<std::vector<bool>>> spy_powers(const MatrixFunction& N,
                                                       int powers, double threshold) {
  if (!N.is_square()) throw DimensionError("spy_powers: square input required");
  if (powers < 1) throw DomainError("spy_powers: powers must be >= 1");
  std::vector<std::vector<std::vector<bool>>> panels;
  MatrixFunction P = N;
  panels.push_back(nonzero_pattern(P, threshold));
  for (int p = 2; p <= powers; ++p) {
    P = mul(P, N);
    panels.push_back(nonzero_pattern(P, threshold));
  }
  return panels;
}

std::string render_ascii(const std::vector<std::vector<std::vector<bool>>>& panels) {
  std::ostringstream os;
  for (size_t p = 0; p < panels.size(); ++p) {
    os << "N^" << (p + 1) << "  nnz=" << pattern_count(panels[p]) << "\n";
    for (const auto& row : panels[p]) {
      for (const bool v : row) os << (v ? 'X' : '.');
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::string render_svg(const std::vector<std::vector<std::vector<bool>>>& panels) {
  const int cell = 8;
  const int gap = 16;
  const int label_h = 14;
  int width = gap;
  int height = 0;
  for (const auto& panel : panels) {
    const int rows = static_cast<int>(panel.size());
    const int cols = rows > 0 ? static_cast<int>(panel[0].size()) : 0;
    width += cols * cell + gap;
    height = std::max(height, rows * cell + label_h + 2 * gap);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  int x0 = gap;
  for (size_t p = 0; p < panels.size(); ++p) {
    const int rows = static_cast<int>(panels[p].size());
    const int cols = rows > 0 ? static_cast<int>(panels[p][0].size()) : 0;
    const int y0 = label_h + gap;
    os << "<text x=\"" << x0 << "\" y=\"" << label_h << "\" font-family=\"monospace\" font-size=\"12\">N^"
       << (p + 1) << " nnz=" << pattern_count(panels[p]) << "</text>\n";
    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << cols * cell
       << "\" height=\"" << rows * cell << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (!panels[p][static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
        os << "<rect x=\"" << x0 + j * cell << "\" y=\"" << y0 + i * cell
           << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"black\"/>\n";
      }
    }
    x0 += cols * cell + gap;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sscf
