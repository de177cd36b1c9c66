#pragma once

// Desk-scale experiments on translated hoop families: Hellinger decay between
// r-Fock marginals, ergodic averages along the translation orbit, likelihood
// classification of samples, and Euclidean invariance of the covariance.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "rfock/covariance.hpp"
#include "rfock/cylindrical.hpp"
#include "rfock/geometry.hpp"
#include "rfock/parallel.hpp"

namespace rfock {

struct ExperimentConfig {
  Hoop base_hoop = unit_square();
  std::vector<double> r_values{0.3, 0.6};
  int family_size_max = 50;
  double separation = 20.0;
  Vec3 direction = Vec3::UnitX();
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  Mollifier conv = Mollifier::PaperLiteral;
  double tol = kDefaultTol;
  unsigned threads = 1;

  void validate() const {
    if (!(separation > 0.0)) throw InvalidArgument("separation must be > 0");
    if (family_size_max < 2) throw InvalidArgument("family_size_max must be >= 2");
    if (r_values.empty()) throw InvalidArgument("r_values must be non-empty");
    for (double r : r_values) SmearingScale{r};
  }
};

/// Copies of `base` translated by j * spacing * direction, j = 0..n-1.
inline std::vector<Hoop> make_translated_family(const Hoop& base, int n, double spacing,
                                                const Vec3& direction = Vec3::UnitX()) {
  if (n < 1) throw InvalidArgument("family size must be >= 1");
  if (!(spacing > 0.0)) throw InvalidArgument("spacing must be > 0");
  const Vec3 dir = direction.normalized();
  std::vector<Hoop> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    out.push_back(apply_euclidean(EuclideanTransform::translation(j * spacing * dir), base));
  return out;
}

/// Restriction of a measure to its first n family members.
inline CylindricalMeasure leading_marginal(const CylindricalMeasure& m, std::size_t n) {
  if (n > m.size()) throw DimensionMismatch("marginal larger than family");
  std::vector<Hoop> fam(m.family.begin(), m.family.begin() + static_cast<std::ptrdiff_t>(n));
  if (!m.is_gaussian()) return CylindricalMeasure::haar(std::move(fam));
  CovarianceModel cov = m.cov;
  cov.family = fam;
  const auto k = static_cast<Eigen::Index>(n);
  cov.sigma = m.sigma().topLeftCorner(k, k);
  return CylindricalMeasure::gaussian(std::move(cov), Eigen::VectorXd(m.mean.head(k)));
}

struct DecayRow {
  int n;
  double affinity;
  double decorrelation_residual;
};

using DecayTable = std::vector<DecayRow>;

/// Affinity between the two zero-mean r-Fock marginals on the first n
/// translated copies, n = 1..family_size_max.
inline DecayTable hellinger_decay(const ExperimentConfig& cfg, SmearingScale r, SmearingScale r_prime) {
  cfg.validate();
  if (r.value() == r_prime.value()) throw InvalidArgument("hellinger_decay needs r != r'");
  const auto family = make_translated_family(cfg.base_hoop, cfg.family_size_max, cfg.separation,
                                             cfg.direction);
  const auto a = CylindricalMeasure::fock(family, r, cfg.conv, cfg.tol, cfg.threads);
  const auto b = CylindricalMeasure::fock(family, r_prime, cfg.conv, cfg.tol, cfg.threads);
  DecayTable table;
  for (int n = 1; n <= cfg.family_size_max; ++n) {
    const auto res = hellinger_affinity(leading_marginal(a, static_cast<std::size_t>(n)),
                                        leading_marginal(b, static_cast<std::size_t>(n)));
    table.push_back({n, res.affinity, res.decorrelation_residual});
  }
  return table;
}

/// Affinity between the r-Fock marginal and Haar on the first n translated
/// copies (decorrelated product branch).
inline DecayTable hellinger_decay_haar(const ExperimentConfig& cfg, SmearingScale r) {
  cfg.validate();
  const auto family = make_translated_family(cfg.base_hoop, cfg.family_size_max, cfg.separation,
                                             cfg.direction);
  const auto g = CylindricalMeasure::fock(family, r, cfg.conv, cfg.tol, cfg.threads);
  DecayTable table;
  for (int n = 1; n <= cfg.family_size_max; ++n) {
    const auto sub = leading_marginal(g, static_cast<std::size_t>(n));
    const auto res = hellinger_affinity(sub, CylindricalMeasure::haar(sub.family));
    table.push_back({n, res.affinity, res.decorrelation_residual});
  }
  return table;
}

/// Smallest n with affinity(1)^n < threshold.
inline int predicted_crossing(double affinity_one, double threshold = 0.01) {
  if (!(affinity_one < 1.0)) return -1;
  return static_cast<int>(std::ceil(std::log(threshold) / std::log(affinity_one)));
}

struct ErgodicResult {
  std::complex<double> mean;
  double spread = 0.0;
  std::size_t n = 0;
  std::size_t draws = 0;
};

/// Per draw, the orbit average (1/n) sum_j e^{i theta_j} over all family
/// members; returns the across-draw mean and standard deviation.
inline ErgodicResult ergodic_average(const CylindricalMeasure& m, std::size_t draws,
                                     std::uint64_t seed, unsigned threads = 1) {
  if (m.size() < 2) throw InvalidArgument("ergodic average needs n >= 2");
  const CylSample s = sample(m, draws, seed, threads);
  std::vector<std::complex<double>> avg(draws);
  const auto n = static_cast<double>(m.size());
  for (std::size_t d = 0; d < draws; ++d) {
    std::complex<double> z = 0.0;
    for (Eigen::Index i = 0; i < s.angles.cols(); ++i)
      z += std::polar(1.0, s.angles(static_cast<Eigen::Index>(d), i));
    avg[d] = z / n;
  }
  ErgodicResult res;
  res.n = m.size();
  res.draws = draws;
  for (const auto& z : avg) res.mean += z;
  res.mean /= static_cast<double>(draws);
  double var = 0.0;
  for (const auto& z : avg) var += std::norm(z - res.mean);
  res.spread = std::sqrt(var / static_cast<double>(draws > 1 ? draws - 1 : 1));
  return res;
}

/// Builds the translated family, takes the marginal of the same kind as `m`
/// (Haar, or r-Fock at m's r), and averages along it.
inline ErgodicResult ergodic_average(const CylindricalMeasure& m, const Hoop& base, int n,
                                     double spacing, std::size_t draws, std::uint64_t seed,
                                     unsigned threads = 1) {
  if (n < 2) throw InvalidArgument("ergodic average needs n >= 2");
  auto family = make_translated_family(base, n, spacing);
  if (!m.is_gaussian()) return ergodic_average(CylindricalMeasure::haar(family), draws, seed, threads);
  return ergodic_average(
      CylindricalMeasure::fock(family, SmearingScale(m.cov.r), m.cov.conv, m.cov.tol, threads),
      draws, seed, threads);
}

struct ClassificationReport {
  /// loglik(d, k): wrapped log-density of draw d under candidate k.
  Eigen::MatrixXd loglik;
  /// argmax candidate per draw, -1 when the top candidates tie.
  std::vector<int> labels;
  std::optional<double> misclassification_rate;
  std::size_t ambiguous = 0;
};

/// Likelihood classification of each draw among candidate measures. With a
/// known source index, ties count as half an error.
inline ClassificationReport classify_samples(const CylSample& s,
                                             const std::vector<CylindricalMeasure>& candidates,
                                             std::optional<int> truth = std::nullopt,
                                             int terms = 3) {
  if (candidates.empty()) throw InvalidArgument("no candidate measures");
  const auto n = static_cast<std::size_t>(s.angles.cols());
  std::vector<std::optional<WrappedGaussian>> dens;
  for (const auto& c : candidates) {
    if (c.size() != n) throw DimensionMismatch("candidate family differs from sample dimension");
    if (c.is_gaussian())
      dens.emplace_back(std::in_place, c.mean, c.sigma(), terms);
    else
      dens.emplace_back(std::nullopt);
  }
  const double haar_log = -static_cast<double>(n) * std::log(kTwoPi);
  ClassificationReport rep;
  const auto draws = static_cast<Eigen::Index>(s.angles.rows());
  const auto K = static_cast<Eigen::Index>(candidates.size());
  rep.loglik.resize(draws, K);
  rep.labels.resize(static_cast<std::size_t>(draws));
  double errors = 0.0;
  for (Eigen::Index d = 0; d < draws; ++d) {
    const Eigen::VectorXd theta = s.angles.row(d).transpose();
    for (Eigen::Index k = 0; k < K; ++k)
      rep.loglik(d, k) = dens[static_cast<std::size_t>(k)]
                             ? dens[static_cast<std::size_t>(k)]->log_density(theta)
                             : haar_log;
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < K; ++k)
      if (rep.loglik(d, k) > rep.loglik(d, best)) best = k;
    bool tie = false;
    for (Eigen::Index k = 0; k < K; ++k)
      if (k != best && std::abs(rep.loglik(d, k) - rep.loglik(d, best)) <=
                           1e-12 * std::max(1.0, std::abs(rep.loglik(d, best))))
        tie = true;
    rep.labels[static_cast<std::size_t>(d)] = tie ? -1 : static_cast<int>(best);
    if (tie) ++rep.ambiguous;
    if (truth) {
      if (tie)
        errors += 0.5;
      else if (best != *truth)
        errors += 1.0;
    }
  }
  if (truth) rep.misclassification_rate = errors / static_cast<double>(draws);
  return rep;
}

/// max over transforms of |Sigma(T h, T h) - Sigma(h, h)|.
inline double euclidean_invariance_report(const Hoop& h, SmearingScale r,
                                          const std::vector<EuclideanTransform>& transforms,
                                          Mollifier conv = Mollifier::PaperLiteral,
                                          double tol = kDefaultTol, unsigned threads = 1) {
  const double base = pair_covariance(h, h, r, conv, tol);
  std::vector<double> diffs(transforms.size(), 0.0);
  parallel_for(transforms.size(), threads, [&](std::size_t i) {
    const Hoop moved = apply_euclidean(transforms[i], h);
    diffs[i] = std::abs(pair_covariance(moved, moved, r, conv, tol) - base);
  });
  double worst = 0.0;
  for (double d : diffs) worst = std::max(worst, d);
  return worst;
}

}  // namespace rfock
