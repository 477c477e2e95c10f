#pragma once

#include <vector>

namespace sscf::cheb {

/// Chebyshev points of the second kind mapped to increasing order:
/// s_j = -cos(j*pi/n), j = 0..n. For n == 0 returns {0.0}.
std::vector<double> points(int n);

/// Table-backed transform between values at the points above and Chebyshev
/// coefficients. O(n^2), adequate at the degrees this project uses.
class Transform {
 public:
  explicit Transform(int n);
  int n() const { return n_; }
  /// values[j] = f(s_j) with s_j increasing; coeffs gets n+1 entries.
  void vals_to_coeffs(const double* values, double* coeffs) const;
  void coeffs_to_vals(const double* coeffs, double* values) const;

 private:
  int n_;
  std::vector<double> cos_;  // cos(pi*r/n) for r = 0..2n-1
};

/// Clenshaw evaluation of sum c_k T_k(s) for s in [-1,1].
double clenshaw(const double* coeffs, int degree, double s);

/// Coefficients of the derivative; `scale` is the chain-rule factor
/// 2/(b-a) of the underlying interval. Output has max(degree,1) entries
/// (degree of the derivative is degree-1, minimum 0).
std::vector<double> derivative_coeffs(const double* coeffs, int degree,
                                      double scale);

}  // namespace sscf::cheb
