#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sscf/config.hpp"
#include "sscf/errors.hpp"
#include "sscf/interval.hpp"

namespace sscf {

struct FitOptions {
  double tol = defaults::fit_tol;
  int initial_degree = 16;
  int max_degree = defaults::degree_cap;
};

/// Smooth matrix-valued function on a compact interval, stored as one
/// Chebyshev coefficient sequence per entry. All entries share the interval
/// and the (maximal) degree; values are immutable after construction.
class MatrixFunction {
 public:
  MatrixFunction() = default;
  MatrixFunction(int rows, int cols, Interval iv, int degree,
                 std::vector<double> coeffs, double fit_tol);

  static MatrixFunction constant(const Eigen::MatrixXd& value, Interval iv);
  static MatrixFunction identity(int n, Interval iv);
  static MatrixFunction zero(int rows, int cols, Interval iv);

  /// Adaptive fit: degree doubles until the coefficient tail and a
  /// between-nodes comparison against the sampler both fall below tol
  /// (relative to max(1, value scale)). The sampler may be called from
  /// several threads at once.
  static MatrixFunction fit(const std::function<Eigen::MatrixXd(double)>& sampler,
                            Interval iv, double tol, const FitOptions& opts = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int degree() const { return degree_; }
  const Interval& interval() const { return iv_; }
  double fit_tol() const { return fit_tol_; }
  bool is_square() const { return rows_ == cols_; }
  bool is_constant() const { return degree_ == 0; }

  const double* entry(int i, int j) const;
  double coeff(int i, int j, int k) const { return entry(i, j)[k]; }

  Eigen::MatrixXd eval(double t) const;

  MatrixFunction derivative() const;
  MatrixFunction transpose() const;
  MatrixFunction block(int r0, int c0, int nr, int nc) const;

  /// Drop trailing coefficients that are at most tol * max(1, coeff scale).
  MatrixFunction compressed(double tol) const;

  double max_abs_coeff() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Interval iv_;
  int degree_ = 0;
  double fit_tol_ = defaults::fit_tol;
  std::vector<double> coeffs_;  // entry-major, (i*cols + j)*(degree+1) + k

  double* entry_mut(int i, int j);
  friend MatrixFunction add(const MatrixFunction&, const MatrixFunction&);
  friend MatrixFunction sub(const MatrixFunction&, const MatrixFunction&);
  friend MatrixFunction scale(const MatrixFunction&, double);
  friend MatrixFunction block_diag(const std::vector<MatrixFunction>&);
  friend MatrixFunction vstack(const std::vector<MatrixFunction>&);
};

MatrixFunction add(const MatrixFunction& a, const MatrixFunction& b);
MatrixFunction sub(const MatrixFunction& a, const MatrixFunction& b);
MatrixFunction scale(const MatrixFunction& a, double s);
/// Exact polynomial product (sampled at deg(a)+deg(b)+1 nodes), compressed.
MatrixFunction mul(const MatrixFunction& a, const MatrixFunction& b);

inline MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b) { return add(a, b); }
inline MatrixFunction operator-(const MatrixFunction& a, const MatrixFunction& b) { return sub(a, b); }
inline MatrixFunction operator*(const MatrixFunction& a, const MatrixFunction& b) { return mul(a, b); }
inline MatrixFunction operator*(double s, const MatrixFunction& a) { return scale(a, s); }

/// Block-diagonal assembly; all blocks must share the interval.
MatrixFunction block_diag(const std::vector<MatrixFunction>& blocks);
MatrixFunction vstack(const std::vector<MatrixFunction>& blocks);
MatrixFunction hstack(const std::vector<MatrixFunction>& blocks);

/// Chebyshev grid of `n` points (n >= 2, endpoints included), increasing.
std::vector<double> chebyshev_grid(const Interval& iv, int n);

/// Values at a grid, kernel-parallel; slot j holds M(ts[j]).
std::vector<Eigen::MatrixXd> eval_grid(const MatrixFunction& M,
                                       const std::vector<double>& ts);

/// Interpolant through prescribed values at the n+1 increasing Chebyshev
/// nodes of chebyshev_grid(iv, n+1).
MatrixFunction interpolate_through(const std::vector<Eigen::MatrixXd>& values,
                                   Interval iv, double fit_tol);

/// sup over the grid of the entrywise largest |A - B|.
double grid_distance(const MatrixFunction& a, const MatrixFunction& b,
                     int grid = defaults::verify_grid);
double sup_abs_on_grid(const MatrixFunction& a, int grid = defaults::verify_grid);

struct SingularCertificate {
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  double worst_t = 0.0;
  int grid_size = 0;
  bool passed(double threshold = defaults::singularity_threshold) const {
    return min_sigma > threshold;
  }
};

/// Sampling certificate: smallest singular value over a Chebyshev grid.
SingularCertificate min_singular_certificate(const MatrixFunction& M,
                                             int grid_size = defaults::certificate_grid);
double min_singular_on_grid(const MatrixFunction& M,
                            int grid_size = defaults::certificate_grid);

struct InverseOptions {
  int grid = defaults::certificate_grid;
  double singularity_threshold = defaults::singularity_threshold;
  FitOptions fit;
};

/// Pointwise inverse refit to an interpolant. Requires the sampling
/// certificate to clear the singularity threshold; the result satisfies
/// ||M * inv - I|| <= tol on the verification grid.
MatrixFunction inverse(const MatrixFunction& M, double tol,
                       const InverseOptions& opts = {});

}  // namespace sscf
