#include "sscf/chebyshev.hpp"

#include <cmath>

#include "sscf/errors.hpp"

namespace sscf::cheb {

std::vector<double> points(int n) {
  if (n < 0) throw DomainError("cheb::points: n must be >= 0");
  if (n == 0) return {0.0};
  std::vector<double> s(n + 1);
  for (int j = 0; j <= n; ++j) {
    s[j] = -std::cos(M_PI * static_cast<double>(j) / n);
  }
  // Endpoints exactly +-1, midpoint exactly 0 for even n.
  s[0] = -1.0;
  s[n] = 1.0;
  if (n % 2 == 0) s[n / 2] = 0.0;
  return s;
}

Transform::Transform(int n) : n_(n) {
  if (n < 1) throw DomainError("cheb::Transform: n must be >= 1");
  cos_.resize(2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    cos_[r] = std::cos(M_PI * static_cast<double>(r) / n);
  }
}

void Transform::vals_to_coeffs(const double* values, double* coeffs) const {
  const int n = n_;
  // Standard points x_i = cos(i*pi/n) run decreasing; our values are stored
  // at increasing s_j = x_{n-j}.
  for (int k = 0; k <= n; ++k) {
    double acc = 0.5 * (values[n] + (k % 2 == 0 ? values[0] : -values[0]));
    for (int i = 1; i < n; ++i) {
      acc += values[n - i] * cos_[(static_cast<long>(k) * i) % (2 * n)];
    }
    double c = 2.0 * acc / n;
    if (k == 0 || k == n) c *= 0.5;
    coeffs[k] = c;
  }
}

void Transform::coeffs_to_vals(const double* coeffs, double* values) const {
  const int n = n_;
  for (int j = 0; j <= n; ++j) {
    const int i = n - j;  // standard index of the j-th increasing point
    double acc = coeffs[0];
    for (int k = 1; k <= n; ++k) {
      acc += coeffs[k] * cos_[(static_cast<long>(k) * i) % (2 * n)];
    }
    values[j] = acc;
  }
}

double clenshaw(const double* coeffs, int degree, double s) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree; k >= 1; --k) {
    const double b0 = coeffs[k] + 2.0 * s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + s * b1 - b2;
}

std::vector<double> derivative_coeffs(const double* c, int degree,
                                      double scale) {
  if (degree == 0) return {0.0};
  const int m = degree;  // output indices 0..m-1
  std::vector<double> d(static_cast<size_t>(m), 0.0);
  d[m - 1] = 2.0 * m * c[m];
  if (m >= 2) d[m - 2] = 2.0 * (m - 1) * c[m - 1];
  for (int k = m - 3; k >= 0; --k) {
    d[k] = d[k + 2] + 2.0 * (k + 1) * c[k + 1];
  }
  d[0] *= 0.5;
  for (double& v : d) v *= scale;
  return d;
}

}  // namespace sscf::cheb
