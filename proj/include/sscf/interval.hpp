#pragma once

#include <cmath>

#include "sscf/errors.hpp"

namespace sscf {

/// Compact interval [a, b] with a < b.
struct Interval {
  double a = -1.0;
  double b = 1.0;

  Interval() = default;
  Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b)) throw DomainError("Interval: requires a < b");
  }

  double width() const { return b - a; }
  double mid() const { return 0.5 * (a + b); }
  double half() const { return 0.5 * (b - a); }

  /// Map t in [a,b] to s in [-1,1].
  double to_unit(double t) const { return (2.0 * t - (a + b)) / (b - a); }
  /// Map s in [-1,1] to t in [a,b].
  double from_unit(double s) const { return mid() + half() * s; }

  bool contains(double t) const {
    const double slack = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
    return t >= a - slack && t <= b + slack;
  }

  bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

}  // namespace sscf
