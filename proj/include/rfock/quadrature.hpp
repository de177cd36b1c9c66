#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rfock/errors.hpp"

namespace rfock {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes from Newton iteration on P_n starting at the Chebyshev guess.
inline GaussLegendreRule gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

/// Rule mapped onto [lo, hi].
inline GaussLegendreRule gauss_legendre(int n, double lo, double hi) {
  GaussLegendreRule rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

/// Cached 10-point rule used by the adaptive integrators.
inline const GaussLegendreRule& gl10() {
  static const GaussLegendreRule rule = gauss_legendre(10);
  return rule;
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int max_depth = 0;
  long evaluations = 0;
};

namespace detail {

template <class F>
double tensor_rule(const F& f, double s0, double s1, double t0, double t1, long& evals) {
  const auto& rule = gl10();
  const double hs = 0.5 * (s1 - s0);
  const double ms = 0.5 * (s1 + s0);
  const double ht = 0.5 * (t1 - t0);
  const double mt = 0.5 * (t1 + t0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = ms + hs * rule.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      inner += rule.weights[j] * f(s, mt + ht * rule.nodes[j]);
    sum += rule.weights[i] * inner;
  }
  evals += static_cast<long>(rule.nodes.size() * rule.nodes.size());
  return sum * hs * ht;
}

template <class F>
void adaptive_rect(const F& f, double s0, double s1, double t0, double t1, double whole,
                   double tol, int depth, int max_depth, QuadratureResult& out) {
  const double sm = 0.5 * (s0 + s1);
  const double tm = 0.5 * (t0 + t1);
  const double q00 = tensor_rule(f, s0, sm, t0, tm, out.evaluations);
  const double q01 = tensor_rule(f, s0, sm, tm, t1, out.evaluations);
  const double q10 = tensor_rule(f, sm, s1, t0, tm, out.evaluations);
  const double q11 = tensor_rule(f, sm, s1, tm, t1, out.evaluations);
  const double refined = q00 + q01 + q10 + q11;
  const double err = std::abs(refined - whole);
  if (err <= tol) {
    out.value += refined;
    out.error_estimate += err;
    out.max_depth = std::max(out.max_depth, depth);
    return;
  }
  if (depth >= max_depth)
    throw QuadratureNonConvergence("bisection depth limit " + std::to_string(max_depth) +
                                   " reached with local error " + std::to_string(err));
  const double sub = 0.25 * tol;
  adaptive_rect(f, s0, sm, t0, tm, q00, sub, depth + 1, max_depth, out);
  adaptive_rect(f, s0, sm, tm, t1, q01, sub, depth + 1, max_depth, out);
  adaptive_rect(f, sm, s1, t0, tm, q10, sub, depth + 1, max_depth, out);
  adaptive_rect(f, sm, s1, tm, t1, q11, sub, depth + 1, max_depth, out);
}

}  // namespace detail

/// Adaptive tensor Gauss-Legendre over [0,1]^2. A rectangle is accepted when
/// its 10x10 value and the sum over its four children agree to the local
/// tolerance; the tolerance is split evenly among children on refinement.
template <class F>
QuadratureResult integrate_unit_square(const F& f, double tol, int max_depth = 20) {
  QuadratureResult out;
  const double whole = detail::tensor_rule(f, 0.0, 1.0, 0.0, 1.0, out.evaluations);
  detail::adaptive_rect(f, 0.0, 1.0, 0.0, 1.0, whole, tol, 0, max_depth, out);
  return out;
}

/// Composite Gauss-Legendre over [lo, hi] with `panels` equal panels.
template <class F>
double composite_gl(const F& f, double lo, double hi, int panels, int order) {
  const GaussLegendreRule rule = gauss_legendre(order);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * f(a + 0.5 * h * (rule.nodes[i] + 1.0));
  }
  return 0.5 * h * sum;
}

}  // namespace rfock
