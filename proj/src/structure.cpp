#include "sscf/structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "sscf/parallel.hpp"
#include "sscf/util.hpp"

namespace sscf {

const char* to_string(SutVariant v) {
  switch (v) {
    case SutVariant::plain: return "plain";
    case SutVariant::columns: return "columns";
    case SutVariant::rows: return "rows";
  }
  return "plain";
}

SutVariant sut_variant_from_string(const std::string& s) {
  if (s == "plain") return SutVariant::plain;
  if (s == "columns" || s == "col") return SutVariant::columns;
  if (s == "rows" || s == "row") return SutVariant::rows;
  throw ParseError("variant", "unknown variant '" + s + "'");
}

BlockSignature::BlockSignature(std::vector<int> e) : ells(std::move(e)) {
  if (ells.size() < 2) throw SignatureError("BlockSignature: mu >= 2 required");
  for (int l : ells)
    if (l <= 0) throw SignatureError("BlockSignature: block sizes must be positive");
}

int BlockSignature::m() const {
  return std::accumulate(ells.begin(), ells.end(), 0);
}

bool BlockSignature::column_ordered() const {
  return std::is_sorted(ells.rbegin(), ells.rend());
}

bool BlockSignature::row_ordered() const {
  return std::is_sorted(ells.begin(), ells.end());
}

std::vector<int> BlockSignature::offsets() const {
  std::vector<int> off(ells.size() + 1, 0);
  for (size_t i = 0; i < ells.size(); ++i) off[i + 1] = off[i] + ells[i];
  return off;
}

namespace {

void check_sut_dims(const MatrixFunction& N, const BlockSignature& sig) {
  if (!N.is_square() || N.rows() != sig.m()) {
    std::ostringstream os;
    os << "SUT predicate: matrix is " << N.rows() << "x" << N.cols()
       << " but signature has m=" << sig.m();
    throw DimensionError(os.str());
  }
}

}  // namespace

bool is_sut(const MatrixFunction& N, const BlockSignature& sig, double tol, int grid) {
  check_sut_dims(N, sig);
  const auto off = sig.offsets();
  const int mu = sig.mu();
  const auto ts = chebyshev_grid(N.interval(), grid);
  std::vector<double> worst(ts.size(), 0.0);
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t q) {
    const Eigen::MatrixXd v = N.eval(ts[static_cast<size_t>(q)]);
    double w = 0.0;
    for (int bi = 0; bi < mu; ++bi)
      for (int bj = 0; bj <= bi; ++bj)
        w = std::max(w, max_abs(v.block(off[bi], off[bj], sig.ells[bi], sig.ells[bj])));
    worst[static_cast<size_t>(q)] = w;
  });
  double w = 0.0;
  for (double x : worst) w = std::max(w, x);
  return w <= tol;
}

namespace {

bool secondary_blocks_full_rank(const MatrixFunction& N, const BlockSignature& sig,
                                bool column_variant, double tol, int grid) {
  const auto off = sig.offsets();
  const int mu = sig.mu();
  const auto ts = chebyshev_grid(N.interval(), grid);
  std::vector<double> mins(ts.size(), std::numeric_limits<double>::infinity());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t q) {
    const Eigen::MatrixXd v = N.eval(ts[static_cast<size_t>(q)]);
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < mu; ++i) {
      const Eigen::MatrixXd blk = v.block(off[i], off[i + 1], sig.ells[i], sig.ells[i + 1]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(blk);
      const int need = column_variant ? sig.ells[i + 1] : sig.ells[i];
      mn = std::min(mn, svd.singularValues()(need - 1));
    }
    mins[static_cast<size_t>(q)] = mn;
  });
  double mn = std::numeric_limits<double>::infinity();
  for (double x : mins) mn = std::min(mn, x);
  return mn > tol;
}

}  // namespace

bool is_sut_columns(const MatrixFunction& N, const BlockSignature& sig,
                    double tol, int grid) {
  if (!sig.column_ordered())
    throw SignatureError("is_sut_columns: signature is not column-ordered");
  if (!is_sut(N, sig, tol, grid)) return false;
  return secondary_blocks_full_rank(N, sig, true, tol, grid);
}

bool is_sut_rows(const MatrixFunction& N, const BlockSignature& sig,
                 double tol, int grid) {
  if (!sig.row_ordered())
    throw SignatureError("is_sut_rows: signature is not row-ordered");
  if (!is_sut(N, sig, tol, grid)) return false;
  return secondary_blocks_full_rank(N, sig, false, tol, grid);
}

Eigen::MatrixXd elementary_col(const BlockSignature& sig) {
  if (!sig.column_ordered())
    throw SignatureError("elementary_col: column-ordered signature required");
  const int m = sig.m();
  const auto off = sig.offsets();
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < sig.mu(); ++i)
    for (int s = 0; s < sig.ells[i + 1]; ++s)
      N(off[i] + s, off[i + 1] + s) = 1.0;
  return N;
}

Eigen::MatrixXd elementary_row(const BlockSignature& sig) {
  if (!sig.row_ordered())
    throw SignatureError("elementary_row: row-ordered signature required");
  const int m = sig.m();
  const auto off = sig.offsets();
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < sig.mu(); ++i) {
    const int shift = sig.ells[i + 1] - sig.ells[i];
    for (int s = 0; s < sig.ells[i]; ++s)
      N(off[i] + s, off[i + 1] + shift + s) = 1.0;
  }
  return N;
}

int numerical_rank(const Eigen::MatrixXd& A, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double smax = s(0);
  if (smax <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax) ++r;
  return r;
}

std::vector<int> ranks_of_powers(const Eigen::MatrixXd& N, double rel_tol) {
  const int m = static_cast<int>(N.rows());
  std::vector<int> ranks;
  Eigen::MatrixXd P = N;
  const double scale = std::max(1.0, max_abs(N));
  for (int p = 1; p <= m + 1; ++p) {
    const bool vanished = max_abs(P) <= 1e-10 * std::pow(scale, p);
    const int r = vanished ? 0 : numerical_rank(P, rel_tol);
    ranks.push_back(r);
    if (r == 0) break;
    P = (P * N).eval();
  }
  return ranks;
}

Characteristics characteristics_from_nilpotent(const Eigen::MatrixXd& N,
                                               int r_total, int d,
                                               double rank_rel_tol) {
  if (N.rows() != N.cols())
    throw DimensionError("characteristics_from_nilpotent: square input required");
  const int msize = static_cast<int>(N.rows());
  const auto ranks = ranks_of_powers(N, rank_rel_tol);
  if (ranks.back() != 0) {
    throw CharacteristicsError(
        "characteristics_from_nilpotent: input is not nilpotent within tolerance");
  }
  const int mu = static_cast<int>(ranks.size());  // smallest p with N^p = 0
  Characteristics c;
  c.m = d + msize;
  c.r = r_total;
  c.mu = mu;
  c.d = d;
  for (int i = 0; i + 2 <= mu; ++i) {
    const int next = (i + 2 <= static_cast<int>(ranks.size()) - 1) ? ranks[i + 1] : 0;
    c.thetas.push_back(ranks[i] - next);
  }
  // theta monotonicity and positivity
  for (size_t i = 0; i + 1 < c.thetas.size(); ++i) {
    if (c.thetas[i] < c.thetas[i + 1])
      throw CharacteristicsError("characteristics: thetas are not nonincreasing");
  }
  if (!c.thetas.empty() && c.thetas.back() <= 0)
    throw CharacteristicsError("characteristics: theta_{mu-2} must be positive");
  const int theta_sum = std::accumulate(c.thetas.begin(), c.thetas.end(), 0);
  if (c.d != c.r - theta_sum) {
    std::ostringstream os;
    os << "characteristics: inconsistent d=" << d << ", expected r - sum(theta) = "
       << (c.r - theta_sum);
    throw CharacteristicsError(os.str());
  }
  if (c.r >= c.m)
    throw CharacteristicsError("characteristics: requires r < m");
  return c;
}

BlockSignature signature_from_characteristics(const Characteristics& c,
                                              int m_nilpotent, SutVariant variant) {
  if (c.mu < 2)
    throw SignatureError("signature_from_characteristics: mu >= 2 required");
  if (static_cast<int>(c.thetas.size()) != c.mu - 1)
    throw SignatureError("signature_from_characteristics: theta count mismatch");
  std::vector<int> ells(static_cast<size_t>(c.mu), 0);
  const int head = c.m - c.r;
  if (variant == SutVariant::columns) {
    ells[0] = head;
    for (int i = 1; i < c.mu; ++i) ells[static_cast<size_t>(i)] = c.thetas[static_cast<size_t>(i - 1)];
  } else if (variant == SutVariant::rows) {
    ells[static_cast<size_t>(c.mu - 1)] = head;
    for (int i = 0; i + 1 < c.mu; ++i)
      ells[static_cast<size_t>(i)] = c.thetas[static_cast<size_t>(c.mu - i - 2)];
  } else {
    throw SignatureError("signature_from_characteristics: variant must be columns or rows");
  }
  BlockSignature sig(ells);
  if (sig.m() != m_nilpotent) {
    std::ostringstream os;
    os << "signature_from_characteristics: block sizes sum to " << sig.m()
       << ", expected " << m_nilpotent;
    throw SignatureError(os.str());
  }
  return sig;
}

std::map<int, int> jordan_blocks(const Characteristics& c, int m) {
  std::map<int, int> blocks;
  const int theta0 = c.thetas.empty() ? 0 : c.thetas.front();
  auto put = [&](int order, int count) {
    if (count < 0)
      throw CharacteristicsError("jordan_blocks: negative block count");
    if (count > 0) blocks[order] = count;
  };
  put(1, m - c.r - theta0);
  for (int k = 1; k + 1 <= c.mu - 1; ++k)
    put(k + 1, c.thetas[static_cast<size_t>(k - 1)] - c.thetas[static_cast<size_t>(k)]);
  if (c.mu >= 2) put(c.mu, c.thetas.back());
  int total = 0;
  for (const auto& [order, count] : blocks) total += order * count;
  if (total != m - c.d) {
    std::ostringstream os;
    os << "jordan_blocks: orders sum to " << total << ", expected " << (m - c.d);
    throw CharacteristicsError(os.str());
  }
  return blocks;
}

std::vector<int> jordan_permutation(const BlockSignature& sig, SutVariant variant) {
  const auto off = sig.offsets();
  const int mu = sig.mu();
  std::vector<int> perm;
  perm.reserve(static_cast<size_t>(sig.m()));
  if (variant == SutVariant::columns) {
    if (!sig.column_ordered())
      throw SignatureError("jordan_permutation: column-ordered signature required");
    // Chain for slot s runs through the blocks with l_i > s, top down.
    for (int s = 0; s < sig.ells[0]; ++s)
      for (int i = 0; i < mu && sig.ells[static_cast<size_t>(i)] > s; ++i)
        perm.push_back(off[static_cast<size_t>(i)] + s);
  } else if (variant == SutVariant::rows) {
    if (!sig.row_ordered())
      throw SignatureError("jordan_permutation: row-ordered signature required");
    // Chains anchor at the right edge of each block: offset o from the end.
    for (int o = 0; o < sig.ells[static_cast<size_t>(mu - 1)]; ++o)
      for (int i = 0; i < mu; ++i)
        if (sig.ells[static_cast<size_t>(i)] > o)
          perm.push_back(off[static_cast<size_t>(i)] + sig.ells[static_cast<size_t>(i)] - 1 - o);
  } else {
    throw SignatureError("jordan_permutation: variant must be columns or rows");
  }
  return perm;
}

Eigen::MatrixXd permute_similarity(const std::vector<int>& p, const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(p.size());
  if (M.rows() != n || M.cols() != n)
    throw DimensionError("permute_similarity: size mismatch");
  Eigen::MatrixXd out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a, b) = M(p[static_cast<size_t>(a)], p[static_cast<size_t>(b)]);
  return out;
}

Eigen::MatrixXd jordan_matrix(const std::map<int, int>& blocks) {
  int m = 0;
  for (const auto& [order, count] : blocks) m += order * count;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  int at = 0;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    for (int c = 0; c < it->second; ++c) {
      for (int s = 0; s + 1 < it->first; ++s) J(at + s, at + s + 1) = 1.0;
      at += it->first;
    }
  }
  return J;
}

}  // namespace sscf
