#pragma once

// Finite-dimensional marginals of the Haar measure and of the r-Fock
// (Gaussian) measures on a hoop family. A point of a marginal is the vector of
// holonomy angles (theta_1, ..., theta_n) in [0, 2 pi)^n.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rfock/covariance.hpp"
#include "rfock/errors.hpp"
#include "rfock/geometry.hpp"
#include "rfock/parallel.hpp"
#include "rfock/rng.hpp"

namespace rfock {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double x) {
  double y = x - kTwoPi * std::floor(x / kTwoPi);
  if (y >= kTwoPi) y = 0.0;
  return y;
}

/// Representative of x - mean in (-pi, pi].
inline double nearest_image(double x) {
  return x - kTwoPi * std::round(x / kTwoPi);
}

enum class MeasureKind { Haar, Gaussian };

struct CylindricalMeasure {
  MeasureKind kind = MeasureKind::Haar;
  std::vector<Hoop> family;
  /// Gaussian only.
  Eigen::VectorXd mean;
  /// Gaussian only; carries r, mollifier convention and quadrature tolerance.
  CovarianceModel cov;

  std::size_t size() const { return family.size(); }
  bool is_gaussian() const { return kind == MeasureKind::Gaussian; }
  const Eigen::MatrixXd& sigma() const { return cov.sigma; }

  static CylindricalMeasure haar(std::vector<Hoop> family) {
    CylindricalMeasure m;
    m.kind = MeasureKind::Haar;
    m.family = std::move(family);
    return m;
  }

  static CylindricalMeasure gaussian(CovarianceModel cov,
                                     std::optional<Eigen::VectorXd> mean = std::nullopt) {
    CylindricalMeasure m;
    m.kind = MeasureKind::Gaussian;
    m.family = cov.family;
    m.mean = mean ? *mean : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cov.size()));
    if (static_cast<std::size_t>(m.mean.size()) != cov.size() ||
        static_cast<std::size_t>(cov.sigma.rows()) != cov.size() ||
        static_cast<std::size_t>(cov.sigma.cols()) != cov.size())
      throw DimensionMismatch("mean, covariance and family sizes differ");
    m.cov = std::move(cov);
    return m;
  }

  /// Gaussian with an explicitly supplied covariance matrix.
  static CylindricalMeasure gaussian(std::vector<Hoop> family, const Eigen::MatrixXd& sigma,
                                     std::optional<Eigen::VectorXd> mean = std::nullopt,
                                     double r = 1.0, Mollifier conv = Mollifier::PaperLiteral) {
    CovarianceModel cov;
    cov.family = std::move(family);
    cov.sigma = sigma;
    cov.r = r;
    cov.conv = conv;
    return gaussian(std::move(cov), std::move(mean));
  }

  /// r-Fock marginal with zero mean on `family`.
  static CylindricalMeasure fock(const std::vector<Hoop>& family, SmearingScale r,
                                 Mollifier conv = Mollifier::PaperLiteral,
                                 double tol = kDefaultTol, unsigned threads = 1) {
    return gaussian(covariance_matrix(family, r, conv, tol, threads));
  }
};

/// Integer coordinates c with h = sum_i c_i family_i. Columns are reduced to a
/// linearly independent subset (pivoted QR) before solving and rounding; the
/// result is verified exactly.
inline std::vector<std::int64_t> family_coordinates(const std::vector<Hoop>& family,
                                                    const Hoop& h) {
  const std::size_t n = family.size();
  std::vector<std::int64_t> coords(n, 0);
  if (h.is_identity()) return coords;
  std::map<Loop, Eigen::Index> rows;
  auto index_of = [&rows](const Loop& l) {
    auto [it, inserted] = rows.try_emplace(l, static_cast<Eigen::Index>(rows.size()));
    return it->second;
  };
  for (const auto& f : family)
    for (const auto& [loop, w] : f.terms()) index_of(loop);
  for (const auto& [loop, w] : h.terms()) index_of(loop);
  const auto L = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, static_cast<Eigen::Index>(n));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(L);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [loop, w] : family[i].terms())
      A(rows.at(loop), static_cast<Eigen::Index>(i)) = static_cast<double>(w);
  for (const auto& [loop, w] : h.terms()) b(rows.at(loop)) = static_cast<double>(w);

  if (n > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::Index rank = qr.rank();
    if (rank > 0) {
      Eigen::MatrixXd sub(L, rank);
      std::vector<Eigen::Index> cols(static_cast<std::size_t>(rank));
      for (Eigen::Index j = 0; j < rank; ++j) {
        cols[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()(j);
        sub.col(j) = A.col(cols[static_cast<std::size_t>(j)]);
      }
      const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(b);
      for (Eigen::Index j = 0; j < rank; ++j)
        coords[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])] =
            static_cast<std::int64_t>(std::llround(x(j)));
    }
  }
  Hoop rebuilt;
  for (std::size_t i = 0; i < n; ++i)
    if (coords[i] != 0) rebuilt = hoop_compose(rebuilt, hoop_power(family[i], coords[i]));
  if (!(rebuilt == h))
    throw HoopNotInFamilySpan("hoop is not an integer combination of the family");
  return coords;
}

inline Eigen::VectorXd to_vector(const std::vector<std::int64_t>& c) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = static_cast<double>(c[i]);
  return v;
}

/// E[exp(i c . theta)] for an integer label vector c.
inline std::complex<double> char_functional(const CylindricalMeasure& m, const Eigen::VectorXd& c) {
  if (static_cast<std::size_t>(c.size()) != m.size())
    throw DimensionMismatch("label vector length differs from family size");
  if (!m.is_gaussian()) return c.isZero() ? 1.0 : 0.0;
  const double phase = c.dot(m.mean);
  const double var = c.dot(m.sigma() * c);
  return std::polar(std::exp(-0.5 * var), phase);
}

inline std::complex<double> char_functional(const CylindricalMeasure& m, const Hoop& h) {
  const auto coords = family_coordinates(m.family, h);
  if (!m.is_gaussian()) return h.is_identity() ? 1.0 : 0.0;
  return char_functional(m, to_vector(coords));
}

/// Draws in row-major order: angles(d, i) is coordinate i of draw d.
struct CylSample {
  Eigen::MatrixXd angles;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Factor L with L L^T = sigma. Cholesky when sigma is positive definite,
/// otherwise V sqrt(Lambda) with eigenvalues in [-1e-10 trace, 0) clamped.
inline Eigen::MatrixXd sampling_factor(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows();
  if (n == 0) return sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  Eigen::VectorXd values = eig.eigenvalues();
  const double floor = -1e-10 * std::abs(sigma.trace());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values[i] < floor)
      throw CholeskyFailure("covariance has eigenvalue " + std::to_string(values[i]));
    values[i] = std::sqrt(std::max(0.0, values[i]));
  }
  return eig.eigenvectors() * values.asDiagonal();
}

}  // namespace detail

/// Unwrapped Gaussian lifts mean + L z, one Philox stream per draw.
inline Eigen::MatrixXd sample_lifts(const CylindricalMeasure& m, std::size_t draws,
                                    std::uint64_t seed, unsigned threads = 1) {
  if (!m.is_gaussian()) throw InvalidArgument("lifts exist only for Gaussian measures");
  if (draws < 1) throw InvalidArgument("draws must be >= 1");
  const auto n = static_cast<Eigen::Index>(m.size());
  const Eigen::MatrixXd L = detail::sampling_factor(m.sigma());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(draws), n);
  parallel_for(draws, threads, [&](std::size_t d) {
    CounterRng rng(seed, d);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
    out.row(static_cast<Eigen::Index>(d)) = (m.mean + L * z).transpose();
  });
  return out;
}

inline CylSample sample(const CylindricalMeasure& m, std::size_t draws, std::uint64_t seed,
                        unsigned threads = 1) {
  if (draws < 1) throw InvalidArgument("draws must be >= 1");
  CylSample s;
  s.draws = draws;
  s.seed = seed;
  const auto n = static_cast<Eigen::Index>(m.size());
  if (m.is_gaussian()) {
    s.angles = sample_lifts(m, draws, seed, threads).unaryExpr([](double x) { return wrap_angle(x); });
    return s;
  }
  s.angles.resize(static_cast<Eigen::Index>(draws), n);
  parallel_for(draws, threads, [&](std::size_t d) {
    CounterRng rng(seed, d);
    for (Eigen::Index i = 0; i < n; ++i)
      s.angles(static_cast<Eigen::Index>(d), i) = kTwoPi * rng.uniform();
  });
  return s;
}

/// Push-forward under the smeared translation by lambda: the mean moves by
/// the shift vector and the covariance is untouched. Haar is invariant and
/// comes back unchanged.
inline CylindricalMeasure pushforward_translate(const CylindricalMeasure& m, const TestField& lambda) {
  if (!m.is_gaussian() || lambda.empty()) return m;
  CylindricalMeasure out = m;
  out.mean += shift_vector(lambda, m.family, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol);
  return out;
}

/// Generalized-connection translation acting directly on the angles.
inline CylindricalMeasure translate_by_angles(const CylindricalMeasure& m, const Eigen::VectorXd& delta) {
  if (static_cast<std::size_t>(delta.size()) != m.size())
    throw DimensionMismatch("angle shift length differs from family size");
  if (!m.is_gaussian()) return m;
  CylindricalMeasure out = m;
  out.mean = (m.mean + delta).unaryExpr([](double x) { return wrap_angle(x); });
  return out;
}

/// Wrapped normal density on the torus, evaluated by lattice sums in log
/// space. Differences are reduced to the nearest image first; the lattice is
/// the full cube {-terms..terms}^n while that has at most 4096 points, and
/// otherwise the zero shift plus single-coordinate shifts.
class WrappedGaussian {
 public:
  static constexpr std::size_t kFullLatticeLimit = 4096;

  WrappedGaussian(Eigen::VectorXd mean, const Eigen::MatrixXd& sigma, int terms)
      : mean_(std::move(mean)), terms_(terms) {
    if (terms < 1) throw InvalidArgument("lattice terms must be >= 1");
    const Eigen::Index n = sigma.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (n == 0 || llt.info() != Eigen::Success)
      throw SingularCovariance("covariance is not positive definite");
    const Eigen::MatrixXd Lmat = llt.matrixL();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(Lmat(i, i) > 0.0)) throw SingularCovariance("zero pivot in Cholesky factor");
      log_det_ += 2.0 * std::log(Lmat(i, i));
    }
    precision_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    precision_ = 0.5 * (precision_ + precision_.transpose());
    double cube = 1.0;
    for (Eigen::Index i = 0; i < n && cube <= kFullLatticeLimit; ++i) cube *= 2.0 * terms + 1.0;
    full_lattice_ = cube <= static_cast<double>(kFullLatticeLimit);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    max_eigenvalue_ = eig.eigenvalues().maxCoeff();
  }

  Eigen::Index dimension() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  bool full_lattice() const { return full_lattice_; }

  double log_density(const Eigen::VectorXd& point) const {
    const Eigen::Index n = mean_.size();
    if (point.size() != n) throw DimensionMismatch("point length differs from dimension");
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) delta[i] = nearest_image(point[i] - mean_[i]);
    const Eigen::VectorXd g = precision_ * delta;
    const double q0 = delta.dot(g);
    const double norm = -0.5 * (static_cast<double>(n) * std::log(kTwoPi) + log_det_);
    // exponents are -q/2 relative to the nearest image
    std::vector<double> expo;
    if (full_lattice_) {
      std::vector<int> k(static_cast<std::size_t>(n), -terms_);
      Eigen::VectorXd shift(n);
      while (true) {
        for (Eigen::Index i = 0; i < n; ++i) shift[i] = kTwoPi * k[static_cast<std::size_t>(i)];
        const double q = q0 + 2.0 * shift.dot(g) + shift.dot(precision_ * shift);
        expo.push_back(-0.5 * q);
        Eigen::Index i = 0;
        while (i < n && ++k[static_cast<std::size_t>(i)] > terms_) {
          k[static_cast<std::size_t>(i)] = -terms_;
          ++i;
        }
        if (i == n) break;
      }
    } else {
      expo.push_back(-0.5 * q0);
      for (Eigen::Index i = 0; i < n; ++i)
        for (int j = -terms_; j <= terms_; ++j) {
          if (j == 0) continue;
          const double v = kTwoPi * j;
          expo.push_back(-0.5 * (q0 + 2.0 * v * g[i] + v * v * precision_(i, i)));
        }
    }
    double top = expo.front();
    for (double e : expo) top = std::max(top, e);
    double acc = 0.0;
    for (double e : expo) acc += std::exp(e - top);
    return norm + top + std::log(acc);
  }

  double density(const Eigen::VectorXd& point) const { return std::exp(log_density(point)); }

  /// Relative mass of the lattice images left out along any single axis,
  /// bounded with the largest covariance eigenvalue as the variance.
  double truncation_bound() const {
    const double dist = std::numbers::pi * (2.0 * terms_ + 1.0);
    return 2.0 * static_cast<double>(mean_.size()) *
           std::exp(-dist * dist / (2.0 * max_eigenvalue_));
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd precision_;
  double log_det_ = 0.0;
  double max_eigenvalue_ = 0.0;
  int terms_;
  bool full_lattice_ = false;
};

/// Radon-Nikodym derivative d(mu translated by lambda)/d(mu) at `point`,
/// a ratio of wrapped normal densities.
inline double rn_density(const CylindricalMeasure& m, const Eigen::VectorXd& shift,
                         const Eigen::VectorXd& point, int terms = 3) {
  if (!m.is_gaussian()) return 1.0;
  if (shift.size() != m.mean.size()) throw DimensionMismatch("shift length differs from family size");
  const WrappedGaussian base(m.mean, m.sigma(), terms);
  const WrappedGaussian moved(m.mean + shift, m.sigma(), terms);
  return std::exp(moved.log_density(point) - base.log_density(point));
}

inline double rn_density(const CylindricalMeasure& m, const TestField& lambda,
                         const Eigen::VectorXd& point, int terms = 3) {
  if (!m.is_gaussian()) return 1.0;
  const Eigen::VectorXd c = shift_vector(lambda, m.family, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol);
  return rn_density(m, c, point, terms);
}

struct HellingerResult {
  double affinity = 1.0;
  /// max_{i != j} |Sigma_ij| / sqrt(Sigma_ii Sigma_jj) of the Gaussian side(s)
  double decorrelation_residual = 0.0;
};

inline double decorrelation_residual(const Eigen::MatrixXd& sigma) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      if (i == j) continue;
      const double d = std::sqrt(sigma(i, i) * sigma(j, j));
      if (d > 0.0) worst = std::max(worst, std::abs(sigma(i, j)) / d);
    }
  return worst;
}

/// \int_0^{2pi} sqrt(w(theta) / 2pi) dtheta for the wrapped normal of
/// variance `var`, by the periodic trapezoid rule.
inline double wrapped_normal_uniform_affinity(double var, int nodes = 2048) {
  if (var <= 0.0) return 0.0;
  const double sd = std::sqrt(var);
  const int images = static_cast<int>(std::ceil(10.0 * sd / kTwoPi)) + 2;
  const double h = kTwoPi / nodes;
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double theta = j * h - std::numbers::pi;
    double w = 0.0;
    for (int k = -images; k <= images; ++k) {
      const double x = theta + kTwoPi * k;
      w += std::exp(-0.5 * x * x / var);
    }
    w /= std::sqrt(kTwoPi * var);
    sum += std::sqrt(w / kTwoPi);
  }
  return sum * h;
}

namespace detail {

inline double log_det_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw SingularCovariance("covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  double s = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) throw SingularCovariance("zero pivot in Cholesky factor");
    s += 2.0 * std::log(L(i, i));
  }
  return s;
}

}  // namespace detail

/// Hellinger affinity \int sqrt(dA dB) between two marginals on one family.
///
/// Gaussian-Gaussian uses the unwrapped closed form
///   det(Sa)^{1/4} det(Sb)^{1/4} / det((Sa+Sb)/2)^{1/2} exp(-dm^T ((Sa+Sb)/2)^{-1} dm / 8).
/// Gaussian-Haar multiplies per-coordinate wrapped-normal-vs-uniform affinities
/// and requires the Gaussian side to be decorrelated below 0.05.
inline HellingerResult hellinger_affinity(const CylindricalMeasure& a, const CylindricalMeasure& b) {
  if (a.size() != b.size()) throw DimensionMismatch("measures live on families of different size");
  HellingerResult res;
  if (!a.is_gaussian() && !b.is_gaussian()) return res;
  if (a.is_gaussian() && b.is_gaussian()) {
    if (a.sigma() == b.sigma() && a.mean == b.mean) {
      res.decorrelation_residual = decorrelation_residual(a.sigma());
      return res;
    }
    const Eigen::MatrixXd avg = 0.5 * (a.sigma() + b.sigma());
    const double log_aff = 0.25 * detail::log_det_pd(a.sigma()) + 0.25 * detail::log_det_pd(b.sigma()) -
                           0.5 * detail::log_det_pd(avg);
    const Eigen::VectorXd dm = a.mean - b.mean;
    const double quad = dm.size() > 0 ? dm.dot(avg.llt().solve(dm)) : 0.0;
    res.affinity = std::exp(log_aff - quad / 8.0);
    res.decorrelation_residual =
        std::max(decorrelation_residual(a.sigma()), decorrelation_residual(b.sigma()));
    return res;
  }
  const CylindricalMeasure& g = a.is_gaussian() ? a : b;
  res.decorrelation_residual = decorrelation_residual(g.sigma());
  if (res.decorrelation_residual >= 0.05)
    throw FamilyNotDecorrelated("max off-diagonal correlation " +
                                std::to_string(res.decorrelation_residual) + " >= 0.05");
  double log_aff = 0.0;
  for (Eigen::Index i = 0; i < g.sigma().rows(); ++i) {
    const double f = wrapped_normal_uniform_affinity(g.sigma()(i, i));
    if (f <= 0.0) {
      res.affinity = 0.0;
      return res;
    }
    log_aff += std::log(f);
  }
  res.affinity = std::exp(log_aff);
  return res;
}

}  // namespace rfock
