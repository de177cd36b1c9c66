#pragma once

// Brute-force momentum-space evaluation of the hoop pairings, used to check the
// position-space closed forms. Integrates
//   (2 pi)^{-3} \int d^3k W(|k|) Re[X_hat_a(k)^* . X_hat_b(k)]
// by a spherical product rule: composite Gauss-Legendre in |k|, Gauss-Legendre
// in cos(theta) over the upper hemisphere (the integrand is even in k), and the
// periodic trapezoid rule in phi.

#include <cmath>
#include <functional>
#include <numbers>

#include "rfock/covariance.hpp"
#include "rfock/geometry.hpp"
#include "rfock/parallel.hpp"
#include "rfock/quadrature.hpp"

namespace rfock {

struct OracleResult {
  double value = 0.0;
  /// |value - value at half the node counts|
  double error_estimate = 0.0;
};

struct OracleGrid {
  int radial_panels;
  int radial_order;
  int polar_nodes;
  int azimuth_nodes;
};

namespace detail {

inline double oracle_sum(const std::vector<Segment>& sa, const std::vector<Segment>& sb,
                         const std::function<double(double)>& weight, double k_max,
                         const OracleGrid& grid, unsigned threads) {
  const GaussLegendreRule polar = gauss_legendre(grid.polar_nodes, 0.0, 1.0);
  const GaussLegendreRule radial_rule = gauss_legendre(grid.radial_order);
  std::vector<double> k_nodes;
  std::vector<double> k_weights;
  const double h = k_max / grid.radial_panels;
  for (int p = 0; p < grid.radial_panels; ++p)
    for (std::size_t i = 0; i < radial_rule.nodes.size(); ++i) {
      k_nodes.push_back(p * h + 0.5 * h * (radial_rule.nodes[i] + 1.0));
      k_weights.push_back(0.5 * h * radial_rule.weights[i]);
    }
  const int nphi = grid.azimuth_nodes;
  std::vector<double> partial(k_nodes.size(), 0.0);
  parallel_for(k_nodes.size(), threads, [&](std::size_t ik) {
    const double k = k_nodes[ik];
    double shell = 0.0;
    for (std::size_t ip = 0; ip < polar.nodes.size(); ++ip) {
      const double ct = polar.nodes[ip];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      double ring = 0.0;
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / nphi;
        const Vec3 kv(k * st * std::cos(phi), k * st * std::sin(phi), k * ct);
        CVec3 xa = CVec3::Zero();
        CVec3 xb = CVec3::Zero();
        for (const auto& s : sa) xa += segment_fourier(s, kv);
        for (const auto& s : sb) xb += segment_fourier(s, kv);
        ring += xa.dot(xb).real();  // Eigen conjugates the left operand
      }
      shell += polar.weights[ip] * ring * (2.0 * std::numbers::pi / nphi);
    }
    // hemisphere doubled
    partial[ik] = k_weights[ik] * k * k * weight(k) * 2.0 * shell;
  });
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum / std::pow(2.0 * std::numbers::pi, 3);
}

}  // namespace detail

/// Pairing with radial weight W(|k|) decaying at least like e^{-decay k^2}.
/// `refine` scales all node counts.
inline OracleResult momentum_oracle_pairing(const Hoop& a, const Hoop& b,
                                            const std::function<double(double)>& weight,
                                            double decay, double refine = 1.0,
                                            unsigned threads = 1) {
  if (a.is_identity() || b.is_identity()) return {};
  std::vector<Segment> sa = a.segments();
  std::vector<Segment> sb = b.segments();
  // Common recentring multiplies both transforms by the same phase.
  Vec3 centroid = Vec3::Zero();
  for (const auto& s : sa) centroid += s.a;
  for (const auto& s : sb) centroid += s.a;
  centroid /= static_cast<double>(sa.size() + sb.size());
  double radius = 0.0;
  for (auto* segs : {&sa, &sb})
    for (auto& s : *segs) {
      s.a -= centroid;
      s.b -= centroid;
      radius = std::max({radius, s.a.norm(), s.b.norm()});
    }
  const double k_max = std::sqrt(40.0 / decay);
  auto grid_for = [&](double f) {
    const double phase = 2.0 * k_max * radius;
    OracleGrid g;
    g.radial_order = 16;
    g.radial_panels = std::max(4, static_cast<int>(std::ceil(f * (phase / std::numbers::pi + 4.0))));
    g.azimuth_nodes = std::max(24, static_cast<int>(std::ceil(f * (1.5 * phase + 24.0))));
    g.polar_nodes = std::max(12, g.azimuth_nodes / 2);
    return g;
  };
  OracleResult out;
  out.value = detail::oracle_sum(sa, sb, weight, k_max, grid_for(refine), threads);
  const double coarse = detail::oracle_sum(sa, sb, weight, k_max, grid_for(0.5 * refine), threads);
  out.error_estimate = std::abs(out.value - coarse);
  return out;
}

/// Momentum-space evaluation of Sigma_ab.
inline OracleResult momentum_oracle_covariance(const Hoop& a, const Hoop& b, SmearingScale r,
                                               Mollifier conv = Mollifier::PaperLiteral,
                                               double refine = 1.0, unsigned threads = 1) {
  const double rr = r.value();
  auto weight = [rr, conv](double k) {
    if (k == 0.0) return 0.0;
    const double f = mollifier_hat(k, SmearingScale(rr), conv);
    return f * f / k;
  };
  OracleResult res = momentum_oracle_pairing(a, b, weight, rr * rr, refine, threads);
  res.value *= 0.5;
  res.error_estimate *= 0.5;
  return res;
}

/// Momentum-space evaluation of \int X_{a,s} . X_{b,r} d^3x.
inline OracleResult momentum_oracle_overlap(const Hoop& a, double s, const Hoop& b, double r,
                                            Mollifier conv = Mollifier::PaperLiteral,
                                            double refine = 1.0, unsigned threads = 1) {
  const double m = mollifier_mass(conv);
  const double t = s * s + r * r;
  auto weight = [m, t](double k) { return m * m * std::exp(-0.5 * t * k * k); };
  return momentum_oracle_pairing(a, b, weight, 0.5 * t, refine, threads);
}

/// Momentum-space evaluation of \int X_{a,s} . X_b d^3x (b unsmeared).
inline OracleResult momentum_oracle_line(const Hoop& a, double s, const Hoop& b,
                                         Mollifier conv = Mollifier::PaperLiteral,
                                         double refine = 1.0, unsigned threads = 1) {
  const double m = mollifier_mass(conv);
  auto weight = [m, s](double k) { return m * std::exp(-0.5 * s * s * k * k); };
  return momentum_oracle_pairing(a, b, weight, 0.5 * s * s, refine, threads);
}

}  // namespace rfock
