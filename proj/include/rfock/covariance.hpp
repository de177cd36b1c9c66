#pragma once

// Bilinear forms on hoops built from Gaussian-smeared form factors.
//
// Fourier convention: g_hat(k) = \int g(x) e^{-i k.x} d^3x, inverse carries
// (2 pi)^{-3}, and (-Laplacian)^{-1/2} acts as division by |k|. Closed-loop
// form factors satisfy k . X_hat = 0, so no transverse projector is needed.
//
//   Sigma_ab = 1/2 <X_{a,r}, (-Lap)^{-1/2} X_{b,r}>
//            = 1/2 \oint_a \oint_b kappa_r(|x - y|) dx . dy
//   c_h(lambda) = \int lambda . X_{h,r} d^3x
//            = sum_j w_j \oint_{beta_j} \oint_h eta_{s_j^2 + r^2}(|x - y|) dx . dy

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "rfock/errors.hpp"
#include "rfock/form_factor.hpp"
#include "rfock/geometry.hpp"
#include "rfock/parallel.hpp"
#include "rfock/quadrature.hpp"
#include "rfock/special_functions.hpp"

namespace rfock {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kQuadratureDepthLimit = 20;

/// Radial position-space kernel of f_hat_r(k)^2 / |k|:
/// kappa_r(u) = mass^2 D(u / 2r) / (2 pi^2 u r), finite at u = 0.
inline double kappa_cov(double u, SmearingScale r, Mollifier conv = Mollifier::PaperLiteral) {
  if (u < 0.0) throw NegativeDistance("kappa_cov called with u < 0");
  const double rr = r.value();
  const double m2 = mollifier_mass(conv) * mollifier_mass(conv);
  return m2 / (4.0 * std::numbers::pi * std::numbers::pi * rr * rr) * dawson_over_x(u / (2.0 * rr));
}

/// Isotropic Gaussian density with per-axis variance t, times `mass`.
inline double gaussian_kernel(double u, double t, double mass) {
  return mass * std::pow(2.0 * std::numbers::pi * t, -1.5) * std::exp(-u * u / (2.0 * t));
}

/// Kernel of the plain L2 pairing of two smeared currents whose widths
/// combine to t = r^2 + s^2.
inline double eta_shift(double u, double t, Mollifier conv = Mollifier::PaperLiteral) {
  if (u < 0.0) throw NegativeDistance("eta_shift called with u < 0");
  if (!(t > 0.0)) throw InvalidArgument("eta_shift needs combined width t > 0");
  const double m = mollifier_mass(conv);
  return gaussian_kernel(u, t, m * m);
}

/// \oint_a \oint_b K(|x - y|) dx . dy over every segment pair. Each pair is
/// integrated adaptively with its share of the absolute tolerance.
template <class Kernel>
double line_pair_integral(const Hoop& a, const Hoop& b, const Kernel& kernel, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be > 0");
  if (a.is_identity() || b.is_identity()) return 0.0;
  const std::vector<Segment> sa = a.segments();
  const std::vector<Segment> sb = b.segments();
  std::size_t active = 0;
  for (const auto& x : sa)
    for (const auto& y : sb)
      if (x.delta().dot(y.delta()) != 0.0) ++active;
  if (active == 0) return 0.0;
  double total = 0.0;
  for (const auto& x : sa) {
    const Vec3 dx = x.delta();
    for (const auto& y : sb) {
      const Vec3 dy = y.delta();
      const double coeff = x.weight * y.weight * dx.dot(dy);
      if (coeff == 0.0) continue;
      const Vec3 offset = x.a - y.a;
      auto integrand = [&](double s, double t) {
        return kernel((offset + s * dx - t * dy).norm());
      };
      const double local = tol / (static_cast<double>(active) * std::abs(coeff));
      total += coeff * integrate_unit_square(integrand, local, kQuadratureDepthLimit).value;
    }
  }
  return total;
}

inline double pair_covariance(const Hoop& a, const Hoop& b, SmearingScale r,
                              Mollifier conv = Mollifier::PaperLiteral, double tol = kDefaultTol) {
  const double rr = r.value();
  const double pref = mollifier_mass(conv) * mollifier_mass(conv) /
                      (4.0 * std::numbers::pi * std::numbers::pi * rr * rr);
  const double inv2r = 1.0 / (2.0 * rr);
  auto kernel = [=](double u) { return pref * dawson_over_x(u * inv2r); };
  // Sigma carries a factor 1/2, so the line integral needs 2 * tol.
  return 0.5 * line_pair_integral(a, b, kernel, 2.0 * tol);
}

/// Covariance of the angle coordinates over a hoop family at one smearing scale.
struct CovarianceModel {
  std::vector<Hoop> family;
  double r = 1.0;
  Mollifier conv = Mollifier::PaperLiteral;
  Eigen::MatrixXd sigma;
  double tol = kDefaultTol;

  std::size_t size() const { return family.size(); }
};

namespace detail {

/// Symmetrize, check positive semidefiniteness, clamp tiny negative
/// eigenvalues. Throws if an eigenvalue falls below -1e-10 * trace.
inline Eigen::MatrixXd psd_clamp(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  if (sym.size() == 0) return sym;
  const double trace = sym.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd values = eig.eigenvalues();
  const double floor = -1e-10 * std::abs(trace);
  bool clamped = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < floor)
      throw NotPositiveSemidefinite("eigenvalue " + std::to_string(values[i]) +
                                    " below -1e-10 * trace; quadrature tolerance too loose?");
    if (values[i] < 0.0) {
      values[i] = 0.0;
      clamped = true;
    }
  }
  if (!clamped) return sym;
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

inline CovarianceModel covariance_matrix(const std::vector<Hoop>& family, SmearingScale r,
                                         Mollifier conv = Mollifier::PaperLiteral,
                                         double tol = kDefaultTol, unsigned threads = 1) {
  if (family.empty()) throw InvalidArgument("covariance family must be non-empty");
  const std::size_t n = family.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    values[p] = pair_covariance(family[pairs[p].first], family[pairs[p].second], r, conv, tol);
  });
  Eigen::MatrixXd sigma(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto i = static_cast<Eigen::Index>(pairs[p].first);
    const auto j = static_cast<Eigen::Index>(pairs[p].second);
    sigma(i, j) = values[p];
    sigma(j, i) = values[p];
  }
  CovarianceModel model;
  model.family = family;
  model.r = r.value();
  model.conv = conv;
  model.tol = tol;
  model.sigma = detail::psd_clamp(sigma);
  return model;
}

/// lambda = sum_j w_j X_{beta_j, s_j}, a smooth transverse test connection.
struct TestField {
  struct Term {
    double weight;
    Hoop hoop;
    double scale;
  };
  std::vector<Term> terms;

  bool empty() const { return terms.empty(); }

  TestField& add(double weight, Hoop hoop, SmearingScale scale) {
    terms.push_back({weight, std::move(hoop), scale.value()});
    return *this;
  }

  TestField scaled(double t) const {
    TestField out = *this;
    for (auto& term : out.terms) term.weight *= t;
    return out;
  }

  TestField operator-() const { return scaled(-1.0); }

  friend TestField operator+(const TestField& a, const TestField& b) {
    TestField out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
  }
};

/// c_h(lambda) = \int lambda . X_{h,r} d^3x, the phase by which the smeared
/// translation moves the holonomy of h.
inline double shift_coefficient(const TestField& lambda, const Hoop& h, SmearingScale r,
                                Mollifier conv = Mollifier::PaperLiteral,
                                double tol = kDefaultTol) {
  if (lambda.empty() || h.is_identity()) return 0.0;
  const double per_term = tol / static_cast<double>(lambda.terms.size());
  double total = 0.0;
  for (const auto& term : lambda.terms) {
    if (term.weight == 0.0) continue;
    const double t = term.scale * term.scale + r.value() * r.value();
    auto kernel = [t, conv](double u) { return eta_shift(u, t, conv); };
    total += term.weight *
             line_pair_integral(term.hoop, h, kernel, per_term / std::abs(term.weight));
  }
  return total;
}

/// \oint_h lambda_a dx^a, the unsmeared line integral of the test field along
/// h. Only one mollifier is involved, so the kernel carries a single factor
/// of the mollifier mass.
inline double line_pairing(const TestField& lambda, const Hoop& h,
                           Mollifier conv = Mollifier::PaperLiteral, double tol = kDefaultTol) {
  if (lambda.empty() || h.is_identity()) return 0.0;
  const double per_term = tol / static_cast<double>(lambda.terms.size());
  const double mass = mollifier_mass(conv);
  double total = 0.0;
  for (const auto& term : lambda.terms) {
    if (term.weight == 0.0) continue;
    const double t = term.scale * term.scale;
    auto kernel = [t, mass](double u) { return gaussian_kernel(u, t, mass); };
    total += term.weight *
             line_pair_integral(term.hoop, h, kernel, per_term / std::abs(term.weight));
  }
  return total;
}

/// Shift vector (c_{family_i}(lambda))_i.
inline Eigen::VectorXd shift_vector(const TestField& lambda, const std::vector<Hoop>& family,
                                    SmearingScale r, Mollifier conv = Mollifier::PaperLiteral,
                                    double tol = kDefaultTol) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(family.size()));
  for (std::size_t i = 0; i < family.size(); ++i)
    c[static_cast<Eigen::Index>(i)] = shift_coefficient(lambda, family[i], r, conv, tol);
  return c;
}

}  // namespace rfock
