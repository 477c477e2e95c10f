#include "sscf/matrix_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sscf/chebyshev.hpp"
#include "sscf/parallel.hpp"
#include "sscf/util.hpp"

namespace sscf {

namespace {

// Relative cutoff for compressing exact results of arithmetic; a couple of
// orders above machine epsilon so repeated operations stay near roundoff.
constexpr double kCompressRel = 1e-14;

void check_same_shape(const MatrixFunction& a, const MatrixFunction& b,
                      const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": dimension mismatch " << a.rows() << "x" << a.cols()
       << " vs " << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
  if (!(a.interval() == b.interval())) {
    throw DimensionError(std::string(op) + ": interval mismatch");
  }
}

// Between-node points (Chebyshev points of the first kind), increasing.
std::vector<double> midpoints(const Interval& iv, int n) {
  std::vector<double> ts(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double s = -std::cos(M_PI * (2.0 * j + 1.0) / (2.0 * n));
    ts[static_cast<size_t>(j)] = iv.from_unit(s);
  }
  return ts;
}

}  // namespace

MatrixFunction::MatrixFunction(int rows, int cols, Interval iv, int degree,
                               std::vector<double> coeffs, double fit_tol)
    : rows_(rows), cols_(cols), iv_(iv), degree_(degree), fit_tol_(fit_tol),
      coeffs_(std::move(coeffs)) {
  if (rows_ <= 0 || cols_ <= 0) throw DimensionError("MatrixFunction: empty shape");
  if (degree_ < 0 ||
      coeffs_.size() != static_cast<size_t>(rows_) * cols_ * (degree_ + 1)) {
    throw DimensionError("MatrixFunction: coefficient storage mismatch");
  }
}

const double* MatrixFunction::entry(int i, int j) const {
  return coeffs_.data() + (static_cast<size_t>(i) * cols_ + j) * (degree_ + 1);
}

double* MatrixFunction::entry_mut(int i, int j) {
  return coeffs_.data() + (static_cast<size_t>(i) * cols_ + j) * (degree_ + 1);
}

MatrixFunction MatrixFunction::constant(const Eigen::MatrixXd& value, Interval iv) {
  const int r = static_cast<int>(value.rows());
  const int c = static_cast<int>(value.cols());
  std::vector<double> coeffs(static_cast<size_t>(r) * c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      coeffs[static_cast<size_t>(i) * c + j] = value(i, j);
  return MatrixFunction(r, c, iv, 0, std::move(coeffs), defaults::fit_tol);
}

MatrixFunction MatrixFunction::identity(int n, Interval iv) {
  return constant(Eigen::MatrixXd::Identity(n, n), iv);
}

MatrixFunction MatrixFunction::zero(int rows, int cols, Interval iv) {
  return constant(Eigen::MatrixXd::Zero(rows, cols), iv);
}

Eigen::MatrixXd MatrixFunction::eval(double t) const {
  if (!iv_.contains(t)) {
    std::ostringstream os;
    os << "eval: t=" << t << " outside [" << iv_.a << ", " << iv_.b << "]";
    throw DomainError(os.str());
  }
  const double s = std::clamp(iv_.to_unit(t), -1.0, 1.0);
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      out(i, j) = cheb::clenshaw(entry(i, j), degree_, s);
  return out;
}

MatrixFunction MatrixFunction::derivative() const {
  const int out_deg = std::max(degree_ - 1, 0);
  std::vector<double> coeffs(static_cast<size_t>(rows_) * cols_ * (out_deg + 1));
  const double scale = 2.0 / iv_.width();
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      auto d = cheb::derivative_coeffs(entry(i, j), degree_, scale);
      double* dst = coeffs.data() +
                    (static_cast<size_t>(i) * cols_ + j) * (out_deg + 1);
      std::copy(d.begin(), d.end(), dst);
    }
  }
  return MatrixFunction(rows_, cols_, iv_, out_deg, std::move(coeffs), fit_tol_);
}

MatrixFunction MatrixFunction::transpose() const {
  std::vector<double> coeffs(coeffs_.size());
  MatrixFunction out(cols_, rows_, iv_, degree_, std::move(coeffs), fit_tol_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      std::copy(entry(i, j), entry(i, j) + degree_ + 1, out.entry_mut(j, i));
  return out;
}

MatrixFunction MatrixFunction::block(int r0, int c0, int nr, int nc) const {
  if (r0 < 0 || c0 < 0 || nr <= 0 || nc <= 0 || r0 + nr > rows_ || c0 + nc > cols_)
    throw DimensionError("block: out of range");
  std::vector<double> coeffs(static_cast<size_t>(nr) * nc * (degree_ + 1));
  MatrixFunction out(nr, nc, iv_, degree_, std::move(coeffs), fit_tol_);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      std::copy(entry(r0 + i, c0 + j), entry(r0 + i, c0 + j) + degree_ + 1,
                out.entry_mut(i, j));
  return out;
}

double MatrixFunction::max_abs_coeff() const {
  double m = 0.0;
  for (double v : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

MatrixFunction MatrixFunction::compressed(double tol) const {
  const double cutoff = tol * std::max(1.0, max_abs_coeff());
  int keep = 0;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      const double* c = entry(i, j);
      for (int k = degree_; k > keep; --k) {
        if (std::abs(c[k]) > cutoff) {
          keep = k;
          break;
        }
      }
      if (keep == degree_) break;
    }
    if (keep == degree_) break;
  }
  if (keep == degree_) return *this;
  std::vector<double> coeffs(static_cast<size_t>(rows_) * cols_ * (keep + 1));
  MatrixFunction out(rows_, cols_, iv_, keep, std::move(coeffs), fit_tol_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      std::copy(entry(i, j), entry(i, j) + keep + 1, out.entry_mut(i, j));
  return out;
}

std::vector<double> chebyshev_grid(const Interval& iv, int n) {
  if (n < 2) throw DomainError("chebyshev_grid: need at least 2 points");
  auto s = cheb::points(n - 1);
  std::vector<double> ts(s.size());
  for (size_t j = 0; j < s.size(); ++j) ts[j] = iv.from_unit(s[j]);
  ts.front() = iv.a;
  ts.back() = iv.b;
  return ts;
}

std::vector<Eigen::MatrixXd> eval_grid(const MatrixFunction& M,
                                       const std::vector<double>& ts) {
  std::vector<Eigen::MatrixXd> out(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()),
                 [&](std::ptrdiff_t j) { out[static_cast<size_t>(j)] = M.eval(ts[static_cast<size_t>(j)]); });
  return out;
}

MatrixFunction interpolate_through(const std::vector<Eigen::MatrixXd>& values,
                                   Interval iv, double fit_tol) {
  if (values.empty()) throw DimensionError("interpolate_through: no values");
  const int n = static_cast<int>(values.size()) - 1;
  const int r = static_cast<int>(values[0].rows());
  const int c = static_cast<int>(values[0].cols());
  if (n == 0) return MatrixFunction::constant(values[0], iv);
  cheb::Transform tf(n);
  std::vector<double> coeffs(static_cast<size_t>(r) * c * (n + 1));
  par::for_index(static_cast<std::ptrdiff_t>(r) * c, [&](std::ptrdiff_t e) {
    const int i = static_cast<int>(e / c);
    const int j = static_cast<int>(e % c);
    std::vector<double> v(static_cast<size_t>(n) + 1);
    for (int q = 0; q <= n; ++q) v[static_cast<size_t>(q)] = values[static_cast<size_t>(q)](i, j);
    tf.vals_to_coeffs(v.data(), coeffs.data() + static_cast<size_t>(e) * (n + 1));
  });
  return MatrixFunction(r, c, iv, n, std::move(coeffs), fit_tol);
}

MatrixFunction MatrixFunction::fit(const std::function<Eigen::MatrixXd(double)>& sampler,
                                   Interval iv, double tol, const FitOptions& opts) {
  int n = std::max(2, opts.initial_degree);
  for (;; n *= 2) {
    if (n > opts.max_degree) {
      throw NonConvergenceError("fit: degree cap exceeded without tail convergence");
    }
    const auto ts = chebyshev_grid(iv, n + 1);
    std::vector<Eigen::MatrixXd> vals(ts.size());
    par::for_index(static_cast<std::ptrdiff_t>(ts.size()),
                   [&](std::ptrdiff_t j) { vals[static_cast<size_t>(j)] = sampler(ts[static_cast<size_t>(j)]); });
    const int r = static_cast<int>(vals[0].rows());
    const int c = static_cast<int>(vals[0].cols());

    double vscale = 0.0;
    for (const auto& v : vals) vscale = std::max(vscale, max_abs(v));
    const double scale = std::max(1.0, vscale);

    MatrixFunction cand = interpolate_through(vals, iv, tol);

    // Tail test: the last three coefficients of every entry must be small.
    bool tail_ok = true;
    for (int i = 0; i < r && tail_ok; ++i) {
      for (int j = 0; j < c && tail_ok; ++j) {
        const double* cf = cand.entry(i, j);
        for (int k = std::max(0, n - 2); k <= n; ++k) {
          if (std::abs(cf[k]) > tol * scale) {
            tail_ok = false;
            break;
          }
        }
      }
    }
    if (!tail_ok) continue;

    MatrixFunction trimmed = cand.compressed(0.1 * tol);

    // Between-node verification against the sampler.
    const auto mids = midpoints(iv, std::min(n, 64));
    std::vector<double> errs(mids.size());
    par::for_index(static_cast<std::ptrdiff_t>(mids.size()), [&](std::ptrdiff_t j) {
      errs[static_cast<size_t>(j)] =
          max_abs(trimmed.eval(mids[static_cast<size_t>(j)]) - sampler(mids[static_cast<size_t>(j)]));
    });
    double err = 0.0;
    for (double e : errs) err = std::max(err, e);
    if (err <= tol * scale) return trimmed;
  }
}

MatrixFunction add(const MatrixFunction& a, const MatrixFunction& b) {
  check_same_shape(a, b, "add");
  const int deg = std::max(a.degree(), b.degree());
  std::vector<double> coeffs(static_cast<size_t>(a.rows()) * a.cols() * (deg + 1), 0.0);
  MatrixFunction out(a.rows(), a.cols(), a.interval(), deg, std::move(coeffs),
                     std::max(a.fit_tol(), b.fit_tol()));
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      double* dst = out.entry_mut(i, j);
      const double* ca = a.entry(i, j);
      const double* cb = b.entry(i, j);
      for (int k = 0; k <= a.degree(); ++k) dst[k] += ca[k];
      for (int k = 0; k <= b.degree(); ++k) dst[k] += cb[k];
    }
  }
  return out.compressed(kCompressRel);
}

MatrixFunction sub(const MatrixFunction& a, const MatrixFunction& b) {
  return add(a, scale(b, -1.0));
}

MatrixFunction scale(const MatrixFunction& a, double s) {
  MatrixFunction out = a;
  for (double& v : out.coeffs_) v *= s;
  return out;
}

namespace {

// Multiplication by a constant factor is a linear combination of coefficient
// sequences; doing it in coefficient space keeps exact zeros exact.
MatrixFunction mul_constant(const MatrixFunction& a, const MatrixFunction& b) {
  const bool const_right = b.is_constant();
  const MatrixFunction& f = const_right ? a : b;
  const Eigen::MatrixXd c = (const_right ? b : a).eval(a.interval().mid());
  const int rows = const_right ? f.rows() : static_cast<int>(c.rows());
  const int cols = const_right ? static_cast<int>(c.cols()) : f.cols();
  const int deg = f.degree();
  std::vector<double> flat(static_cast<size_t>(rows) * cols * (deg + 1), 0.0);
  for (int k = 0; k <= deg; ++k) {
    Eigen::MatrixXd fk(f.rows(), f.cols());
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < f.cols(); ++j) fk(i, j) = f.entry(i, j)[k];
    const Eigen::MatrixXd outk = const_right ? (fk * c).eval() : (c * fk).eval();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        flat[(static_cast<size_t>(i) * cols + j) * (deg + 1) + k] = outk(i, j);
  }
  return MatrixFunction(rows, cols, a.interval(), deg, std::move(flat),
                        std::max(a.fit_tol(), b.fit_tol()));
}

}  // namespace

MatrixFunction mul(const MatrixFunction& a, const MatrixFunction& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "mul: inner dimension mismatch " << a.cols() << " vs " << b.rows();
    throw DimensionError(os.str());
  }
  if (!(a.interval() == b.interval())) throw DimensionError("mul: interval mismatch");
  const Interval iv = a.interval();
  const double ftol = std::max(a.fit_tol(), b.fit_tol());
  if (a.is_constant() && b.is_constant()) {
    return MatrixFunction::constant(a.eval(iv.mid()) * b.eval(iv.mid()), iv);
  }
  if (a.is_constant() || b.is_constant()) {
    return mul_constant(a, b).compressed(kCompressRel);
  }
  const int n = std::max(1, a.degree() + b.degree());
  const auto ts = chebyshev_grid(iv, n + 1);
  std::vector<Eigen::MatrixXd> vals(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
    vals[static_cast<size_t>(j)] = a.eval(ts[static_cast<size_t>(j)]) * b.eval(ts[static_cast<size_t>(j)]);
  });
  return interpolate_through(vals, iv, ftol).compressed(kCompressRel);
}

MatrixFunction block_diag(const std::vector<MatrixFunction>& blocks) {
  if (blocks.empty()) throw DimensionError("block_diag: no blocks");
  int rows = 0, cols = 0, deg = 0;
  double ftol = 0.0;
  for (const auto& b : blocks) {
    if (!(b.interval() == blocks[0].interval()))
      throw DimensionError("block_diag: interval mismatch");
    rows += b.rows();
    cols += b.cols();
    deg = std::max(deg, b.degree());
    ftol = std::max(ftol, b.fit_tol());
  }
  std::vector<double> coeffs(static_cast<size_t>(rows) * cols * (deg + 1), 0.0);
  MatrixFunction out(rows, cols, blocks[0].interval(), deg, std::move(coeffs), ftol);
  int r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j)
        std::copy(b.entry(i, j), b.entry(i, j) + b.degree() + 1,
                  out.entry_mut(r0 + i, c0 + j));
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

MatrixFunction vstack(const std::vector<MatrixFunction>& blocks) {
  if (blocks.empty()) throw DimensionError("vstack: no blocks");
  int rows = 0, deg = 0;
  double ftol = 0.0;
  const int cols = blocks[0].cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionError("vstack: column mismatch");
    if (!(b.interval() == blocks[0].interval()))
      throw DimensionError("vstack: interval mismatch");
    rows += b.rows();
    deg = std::max(deg, b.degree());
    ftol = std::max(ftol, b.fit_tol());
  }
  std::vector<double> coeffs(static_cast<size_t>(rows) * cols * (deg + 1), 0.0);
  MatrixFunction out(rows, cols, blocks[0].interval(), deg, std::move(coeffs), ftol);
  int r0 = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < cols; ++j)
        std::copy(b.entry(i, j), b.entry(i, j) + b.degree() + 1,
                  out.entry_mut(r0 + i, j));
    r0 += b.rows();
  }
  return out;
}

MatrixFunction hstack(const std::vector<MatrixFunction>& blocks) {
  std::vector<MatrixFunction> t;
  t.reserve(blocks.size());
  for (const auto& b : blocks) t.push_back(b.transpose());
  return vstack(t).transpose();
}

double grid_distance(const MatrixFunction& a, const MatrixFunction& b, int grid) {
  check_same_shape(a, b, "grid_distance");
  const auto ts = chebyshev_grid(a.interval(), grid);
  std::vector<double> d(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
    d[static_cast<size_t>(j)] = max_abs(a.eval(ts[static_cast<size_t>(j)]) - b.eval(ts[static_cast<size_t>(j)]));
  });
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

double sup_abs_on_grid(const MatrixFunction& a, int grid) {
  const auto ts = chebyshev_grid(a.interval(), grid);
  std::vector<double> d(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()),
                 [&](std::ptrdiff_t j) { d[static_cast<size_t>(j)] = max_abs(a.eval(ts[static_cast<size_t>(j)])); });
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

SingularCertificate min_singular_certificate(const MatrixFunction& M, int grid_size) {
  const auto ts = chebyshev_grid(M.interval(), grid_size);
  std::vector<double> sigma(ts.size()), sigma_hi(ts.size());
  par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.eval(ts[static_cast<size_t>(j)]));
    sigma[static_cast<size_t>(j)] = svd.singularValues().minCoeff();
    sigma_hi[static_cast<size_t>(j)] = svd.singularValues().maxCoeff();
  });
  SingularCertificate cert;
  cert.grid_size = grid_size;
  cert.min_sigma = sigma[0];
  cert.worst_t = ts[0];
  cert.max_sigma = sigma_hi[0];
  for (size_t j = 1; j < sigma.size(); ++j) {
    cert.max_sigma = std::max(cert.max_sigma, sigma_hi[j]);
    if (sigma[j] < cert.min_sigma) {
      cert.min_sigma = sigma[j];
      cert.worst_t = ts[j];
    }
  }
  return cert;
}

double min_singular_on_grid(const MatrixFunction& M, int grid_size) {
  if (!M.is_square()) throw DimensionError("min_singular_on_grid: square input required");
  return min_singular_certificate(M, grid_size).min_sigma;
}

MatrixFunction inverse(const MatrixFunction& M, double tol, const InverseOptions& opts) {
  if (!M.is_square()) throw DimensionError("inverse: square input required");
  const auto cert = min_singular_certificate(M, opts.grid);
  if (!cert.passed(opts.singularity_threshold)) {
    std::ostringstream os;
    os << "inverse: near-singular input, sigma_min=" << cert.min_sigma
       << " at t=" << cert.worst_t;
    throw NearSingularError(os.str(), cert.worst_t, cert.min_sigma);
  }
  FitOptions fo = opts.fit;
  fo.tol = std::clamp(tol * 1e-4, 5e-14, defaults::fit_tol);
  // Pointwise solves cannot beat kappa * eps; do not ask the fit to.
  const double kappa = cert.max_sigma / std::max(cert.min_sigma, 1e-300);
  fo.tol = std::max(fo.tol, 2.0 * 2.22e-16 * kappa);
  // Skip ahead for high-degree inputs but leave room to double under the cap.
  fo.initial_degree = std::clamp(2 * M.degree(), fo.initial_degree, 128);
  MatrixFunction inv = MatrixFunction::fit(
      [&](double t) { return M.eval(t).partialPivLu().inverse().eval(); },
      M.interval(), fo.tol, fo);

  const auto ts = chebyshev_grid(M.interval(), defaults::verify_grid);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M.rows(), M.rows());
  const auto residual_of = [&](const MatrixFunction& X) {
    std::vector<double> res(ts.size());
    par::for_index(static_cast<std::ptrdiff_t>(ts.size()), [&](std::ptrdiff_t j) {
      res[static_cast<size_t>(j)] =
          max_abs(M.eval(ts[static_cast<size_t>(j)]) * X.eval(ts[static_cast<size_t>(j)]) - I);
    });
    double worst = 0.0;
    for (double v : res) worst = std::max(worst, v);
    return worst;
  };

  // For ill-conditioned inputs the pointwise inverses carry kappa*eps noise
  // that the fit inherits; Schulz steps on the interpolant square the
  // residual away and stall at the product roundoff level.
  double worst = residual_of(inv);
  const MatrixFunction I_mf = MatrixFunction::identity(M.rows(), M.interval());
  for (int iter = 0; iter < 3 && worst > 0.05 * tol; ++iter) {
    MatrixFunction refined =
        add(inv, mul(inv, sub(I_mf, mul(M, inv)))).compressed(kCompressRel);
    const double next = residual_of(refined);
    if (next >= worst) break;
    inv = std::move(refined);
    worst = next;
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "inverse: residual " << worst << " above tol " << tol;
    throw NonConvergenceError(os.str());
  }
  return inv;
}

}  // namespace sscf
