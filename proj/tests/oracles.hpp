#pragma once

// Independent numerical references for the unit tests. Nothing here shares
// code paths with the closed forms under test beyond the geometry types and
// the Gauss-Legendre node generator.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "rfock/geometry.hpp"
#include "rfock/quadrature.hpp"

namespace oracle {

using rfock::Hoop;
using rfock::Vec3;

inline constexpr double kPi = std::numbers::pi;

/// Composite Gauss-Legendre on [lo, hi].
template <class F>
double integrate(F&& f, double lo, double hi, int panels = 64, int order = 16) {
  const auto rule = rfock::gauss_legendre(order);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * 0.5 * h * f(a + 0.5 * h * (rule.nodes[i] + 1.0));
  }
  return sum;
}

/// \oint e^{i k.x} dx along every segment, by quadrature in the segment parameter.
inline std::array<std::complex<double>, 3> loop_fourier(const Hoop& h, const Vec3& k) {
  std::array<std::complex<double>, 3> out{};
  for (const auto& s : h.segments()) {
    const Vec3 d = s.b - s.a;
    for (int c = 0; c < 3; ++c) {
      const double re = integrate([&](double t) { return std::cos(k.dot(s.a + t * d)); }, 0.0, 1.0);
      const double im = integrate([&](double t) { return std::sin(k.dot(s.a + t * d)); }, 0.0, 1.0);
      out[c] += s.weight * d[c] * std::complex<double>(re, im);
    }
  }
  return out;
}

/// Gaussian mollifier of total mass `mass` and width r.
inline double gaussian(const Vec3& x, double r, double mass) {
  return mass * std::exp(-x.squaredNorm() / (2 * r * r)) / std::pow(2 * kPi * r * r, 1.5);
}

/// \oint f_r(x - y) dy, by quadrature along each segment.
inline Vec3 smeared_field(const Hoop& h, double r, double mass, const Vec3& x) {
  Vec3 out = Vec3::Zero();
  for (const auto& s : h.segments()) {
    const Vec3 d = s.b - s.a;
    const double v = integrate([&](double t) { return gaussian(x - (s.a + t * d), r, mass); }, 0.0, 1.0,
                               256, 16);
    out += s.weight * v * d;
  }
  return out;
}

/// 3D integral of the literal mollifier e^{-x^2/2r^2} / (2 pi^{3/2} r^3)
/// (scaled by `scale`) by a tensor rule on a box of half-width 10 r.
inline double mollifier_mass_3d(double r, double scale) {
  const double L = 10 * r;
  const auto rule = rfock::gauss_legendre(48, -L, L);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const Vec3 x(rule.nodes[i], rule.nodes[j], rule.nodes[k]);
        sum += rule.weights[i] * rule.weights[j] * rule.weights[k] * scale *
               std::exp(-x.squaredNorm() / (2 * r * r)) / (2 * std::pow(kPi, 1.5) * r * r * r);
      }
  return sum;
}

/// Radial Fourier inversion of an isotropic spectrum F(k):
///   (2 pi)^{-3} \int F(|k|) e^{i k.u} d^3k.
template <class F>
double radial_inverse(F&& spectrum, double u, double kmax) {
  if (u == 0.0)
    return integrate([&](double k) { return k * k * spectrum(k); }, 0.0, kmax, 400, 16) /
           (2 * kPi * kPi);
  return integrate([&](double k) { return k * std::sin(k * u) * spectrum(k); }, 0.0, kmax, 2000, 16) /
         (2 * kPi * kPi * u);
}

/// Covariance kernel from its spectrum |f_hat|^2 / |k|, f_hat = mass e^{-r^2 k^2 / 2}.
inline double kappa(double u, double r, double mass) {
  return radial_inverse([&](double k) { return mass * mass * std::exp(-r * r * k * k) / k; }, u,
                        12.0 / r);
}

/// Shift kernel from its spectrum f_hat_s f_hat_r.
inline double eta(double u, double s, double r, double mass) {
  const double t = s * s + r * r;
  return radial_inverse([&](double k) { return mass * mass * std::exp(-t * k * k / 2); }, u,
                        12.0 / std::sqrt(t));
}

/// \int sqrt(p q) for centred normals of standard deviations a, b.
inline double hellinger_1d(double a, double b) {
  auto n = [](double x, double s) { return std::exp(-x * x / (2 * s * s)) / std::sqrt(2 * kPi) / s; };
  const double L = 12 * std::max(a, b);
  return integrate([&](double x) { return std::sqrt(n(x, a) * n(x, b)); }, -L, L, 200, 16);
}

/// Dawson function values (x, D(x)) computed with 30-digit arithmetic.
inline const std::vector<std::pair<double, double>>& dawson_table() {
  static const std::vector<std::pair<double, double>> t{
      {0.001, 0.00099999933333360002074},
      {0.1, 0.099335992397852866591},
      {0.19, 0.18549268702269874939},
      {0.2, 0.19475103336802805989},
      {0.5, 0.42443638350202229593},
      {0.924138873, 0.54104422463518169847},
      {1.0, 0.53807950691276841914},
      {2.0, 0.30134038892379196603},
      {3.5, 0.14962159308075648475},
      {6.4, 0.079115935911133727727},
      {6.6, 0.07665897022891429371},
      {10.0, 0.050253847187598528033},
      {50.0, 0.010002001201201683031},
  };
  return t;
}

}  // namespace oracle
