#pragma once

#include <cmath>
#include <numbers>

namespace rfock {

/// Dawson integral D(x) = e^{-x^2} \int_0^x e^{t^2} dt.
///
/// |x| < 0.2   : alternating Maclaurin series of D.
/// |x| <= 6.5  : e^{-x^2} times the positive series sum x^{2n+1} / (n! (2n+1)),
///               which has no cancellation, so relative accuracy stays near
///               machine precision.
/// |x| > 6.5   : asymptotic series 1/(2x) sum (2n-1)!! / (2x^2)^n, truncated at
///               its smallest term (below 1e-17 relative here).
inline double dawson(double x) {
  const double ax = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (ax < 0.2) {
    // D(x) = sum (-1)^n 2^n x^{2n+1} / (2n+1)!!
    const double x2 = ax * ax;
    double term = ax;
    double sum = ax;
    for (int n = 1; n < 30; ++n) {
      term *= -2.0 * x2 / (2.0 * n + 1.0);
      sum += term;
      if (std::abs(term) < 1e-18 * sum) break;
    }
    return sign * sum;
  }
  if (ax <= 6.5) {
    const double x2 = ax * ax;
    double power = ax;  // x^{2n+1} / n!
    double sum = ax;
    for (int n = 1; n < 400; ++n) {
      power *= x2 / n;
      const double term = power / (2.0 * n + 1.0);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sign * std::exp(-x2) * sum;
  }
  const double inv2x2 = 1.0 / (2.0 * ax * ax);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 60; ++n) {
    const double next = term * (2.0 * n - 1.0) * inv2x2;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sign * sum / (2.0 * ax);
}

/// D(x)/x, finite at x = 0 where it equals 1.
inline double dawson_over_x(double x) {
  const double ax = std::abs(x);
  if (ax < 0.2) {
    const double x2 = ax * ax;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 30; ++n) {
      term *= -2.0 * x2 / (2.0 * n + 1.0);
      sum += term;
      if (std::abs(term) < 1e-18 * sum) break;
    }
    return sum;
  }
  return dawson(ax) / ax;
}

/// erf(hi) - erf(lo) without cancellation when both arguments sit in the
/// same tail.
inline double erf_diff(double lo, double hi) {
  if (lo >= 0.0 && hi >= 0.0) return std::erfc(lo) - std::erfc(hi);
  if (lo <= 0.0 && hi <= 0.0) return std::erfc(-hi) - std::erfc(-lo);
  return std::erf(hi) - std::erf(lo);
}

}  // namespace rfock
