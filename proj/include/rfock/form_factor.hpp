#pragma once

// Gaussian mollifier f_r and point values of the smeared form factor
// X_{h,r}(x) = \int f_r(y - x) X_h(y) d^3y of a hoop.

#include <cmath>
#include <numbers>
#include <string_view>

#include "rfock/errors.hpp"
#include "rfock/geometry.hpp"
#include "rfock/special_functions.hpp"

namespace rfock {

/// Normalization of the Gaussian mollifier.
///
/// PaperLiteral: f_r(x) = e^{-x^2/2r^2} / (2 pi^{3/2} r^3), total mass sqrt(2).
/// UnitNormalized: the same profile divided by sqrt(2), total mass 1.
enum class Mollifier { PaperLiteral, UnitNormalized };

inline std::string_view to_string(Mollifier m) {
  return m == Mollifier::PaperLiteral ? "paper" : "unit";
}

inline Mollifier mollifier_from_string(std::string_view s) {
  if (s == "paper") return Mollifier::PaperLiteral;
  if (s == "unit") return Mollifier::UnitNormalized;
  throw InvalidArgument("mollifier must be 'paper' or 'unit', got '" + std::string(s) + "'");
}

/// Total mass \int f_r d^3x, which is also f_hat_r(0).
inline double mollifier_mass(Mollifier m) {
  return m == Mollifier::PaperLiteral ? std::numbers::sqrt2 : 1.0;
}

/// Positive smearing radius r.
class SmearingScale {
 public:
  explicit SmearingScale(double r) : r_(r) {
    if (!(r > 0.0) || !std::isfinite(r))
      throw InvalidArgument("smearing scale must be positive and finite");
  }
  double value() const { return r_; }
  operator double() const { return r_; }

 private:
  double r_;
};

inline double mollifier(const Vec3& x, SmearingScale r, Mollifier conv = Mollifier::PaperLiteral) {
  const double rr = r.value();
  const double pref = 1.0 / (2.0 * std::pow(std::numbers::pi, 1.5) * rr * rr * rr);
  const double v = pref * std::exp(-x.squaredNorm() / (2.0 * rr * rr));
  return conv == Mollifier::PaperLiteral ? v : v / std::numbers::sqrt2;
}

/// Fourier transform of the mollifier, mass * e^{-r^2 k^2 / 2}.
inline double mollifier_hat(double k, SmearingScale r, Mollifier conv = Mollifier::PaperLiteral) {
  return mollifier_mass(conv) * std::exp(-0.5 * r.value() * r.value() * k * k);
}

/// Smeared field of one straight segment: perpendicular Gaussian factor times
/// the axial integral, which is an error-function difference.
inline Vec3 smeared_segment(const Segment& seg, double r, const Vec3& x, Mollifier conv) {
  const Vec3 d = seg.delta();
  const double len = d.norm();
  if (len == 0.0) return Vec3::Zero();
  const Vec3 u = d / len;
  const Vec3 rel = x - seg.a;
  const double s0 = rel.dot(u);
  const double perp2 = std::max(0.0, rel.squaredNorm() - s0 * s0);
  const double pref = 1.0 / (2.0 * std::pow(std::numbers::pi, 1.5) * r * r * r);
  const double scale = std::numbers::sqrt2 * r;
  const double axial =
      r * std::sqrt(std::numbers::pi / 2.0) * erf_diff(-s0 / scale, (len - s0) / scale);
  double v = pref * std::exp(-perp2 / (2.0 * r * r)) * axial * seg.weight;
  if (conv == Mollifier::UnitNormalized) v /= std::numbers::sqrt2;
  return v * u;
}

inline Vec3 smeared_form_factor(const Hoop& h, SmearingScale r, const Vec3& x,
                                Mollifier conv = Mollifier::PaperLiteral) {
  Vec3 out = Vec3::Zero();
  for (const auto& [loop, w] : h.terms())
    for (std::size_t i = 0; i < loop.size(); ++i)
      out += smeared_segment(loop.segment(i, static_cast<double>(w)), r.value(), x, conv);
  return out;
}

/// Central-difference divergence of the smeared form factor at x.
inline double divergence_residual(const Hoop& h, SmearingScale r, const Vec3& x, double step,
                                  Mollifier conv = Mollifier::PaperLiteral) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  double div = 0.0;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = step;
    div += (smeared_form_factor(h, r, x + e, conv)[a] - smeared_form_factor(h, r, x - e, conv)[a]) /
           (2.0 * step);
  }
  return div;
}

}  // namespace rfock
