#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "oracles.hpp"
#include "rfock/cylindrical.hpp"
#include "rfock/random_geometry.hpp"
#include "rfock/singularity_lab.hpp"

using namespace rfock;

namespace {

const SmearingScale kHalf(0.5);

std::vector<Hoop> spaced_squares(int n, double spacing = 3.0) {
  return make_translated_family(unit_square(), n, spacing);
}

/// Small-variance three-hoop family (Sigma_ii ~ 0.17).
CylindricalMeasure small_family() { return CylindricalMeasure::fock(spaced_squares(3, 1.5), kHalf); }

TestField nearby_field(double w = 0.4) {
  TestField f;
  f.add(w, unit_square(Vec3(0.3, 0.2, 0.5)), SmearingScale(0.5));
  return f;
}

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

}  // namespace

TEST(Wrap, AnglesLandInRange) {
  for (double x : {-10.0, -kTwoPi, -1e-300, 0.0, 3.0, kTwoPi, 100.0}) {
    const double w = wrap_angle(x);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, kTwoPi);
  }
  EXPECT_NEAR(nearest_image(kTwoPi - 0.1), -0.1, 1e-14);
}

TEST(FamilyCoordinates, SolvesIntegerCombinations) {
  const auto fam = spaced_squares(3);
  const Hoop h = hoop_compose(hoop_power(fam[0], 2), hoop_inverse(fam[2]));
  EXPECT_EQ(family_coordinates(fam, h), (std::vector<std::int64_t>{2, 0, -1}));
  EXPECT_EQ(family_coordinates(fam, Hoop::identity()), (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_THROW(family_coordinates(fam, unit_square(Vec3(0, 0, 7))), HoopNotInFamilySpan);
}

TEST(CharFunctional, Haar) {
  const auto m = CylindricalMeasure::haar(spaced_squares(2));
  EXPECT_EQ(char_functional(m, Hoop::identity()), std::complex<double>(1.0));
  EXPECT_EQ(char_functional(m, m.family[0]), std::complex<double>(0.0));
  EXPECT_THROW(char_functional(m, unit_square(Vec3(0, 0, 9))), HoopNotInFamilySpan);
}

TEST(CharFunctional, GaussianZeroMeanIsRealDecay) {
  const auto m = small_family();
  const auto phi = char_functional(m, m.family[0]);
  EXPECT_NEAR(phi.real(), std::exp(-0.5 * m.sigma()(0, 0)), 1e-15);
  EXPECT_EQ(phi.imag(), 0.0);
  EXPECT_GT(phi.real(), 0.0);
  EXPECT_LT(phi.real(), 1.0);
}

TEST(CharFunctional, MatchesMonteCarlo) {
  const auto m = small_family();
  const std::size_t N = 20000;
  const auto s = sample(m, N, 3);
  CounterRng rng(4, 0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd c(3);
    for (int i = 0; i < 3; ++i) c[i] = std::floor(5 * rng.uniform()) - 2;
    std::complex<double> acc = 0.0;
    for (Eigen::Index d = 0; d < s.angles.rows(); ++d) acc += std::polar(1.0, c.dot(s.angles.row(d).transpose()));
    acc /= static_cast<double>(N);
    EXPECT_LT(std::abs(acc - char_functional(m, c)), 3.0 / std::sqrt(static_cast<double>(N)));
  }
}

TEST(CharFunctional, SubFamilyConsistency) {
  const auto full = CylindricalMeasure::fock(spaced_squares(3), kHalf);
  const auto sub = leading_marginal(full, 2);
  const Hoop h = hoop_compose(full.family[0], hoop_power(full.family[1], -3));
  EXPECT_NEAR(std::abs(char_functional(full, h) - char_functional(sub, h)), 0.0, 1e-15);
}

TEST(CharFunctional, DimensionMismatch) {
  EXPECT_THROW(char_functional(small_family(), Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST(Sample, ZeroCovarianceReturnsMean) {
  Eigen::VectorXd mean(2);
  mean << 1.0, 7.0;
  const auto m = CylindricalMeasure::gaussian(spaced_squares(2), Eigen::MatrixXd::Zero(2, 2), mean);
  const auto s = sample(m, 10, 0);
  for (Eigen::Index d = 0; d < 10; ++d) {
    EXPECT_NEAR(s.angles(d, 0), 1.0, 1e-15);
    EXPECT_NEAR(s.angles(d, 1), wrap_angle(7.0), 1e-15);
  }
}

TEST(Sample, HaarIsUniform) {
  const auto m = CylindricalMeasure::haar(spaced_squares(1));
  const std::size_t N = 100000;
  const auto s = sample(m, N, 5);
  std::complex<double> acc = 0.0;
  for (Eigen::Index d = 0; d < s.angles.rows(); ++d) {
    ASSERT_GE(s.angles(d, 0), 0.0);
    ASSERT_LT(s.angles(d, 0), kTwoPi);
    acc += std::polar(1.0, s.angles(d, 0));
  }
  EXPECT_LT(std::abs(acc) / N, 0.01);
}

TEST(Sample, LiftCovarianceMatchesSigma) {
  const auto m = CylindricalMeasure::fock(spaced_squares(3, 1.5), SmearingScale(0.7));
  ASSERT_LT(m.sigma().diagonal().maxCoeff(), 0.1);
  const std::size_t N = 50000;
  const Eigen::MatrixXd lifts = sample_lifts(m, N, 6);
  const Eigen::MatrixXd centred = lifts.rowwise() - lifts.colwise().mean();
  const Eigen::MatrixXd emp = centred.transpose() * centred / static_cast<double>(N - 1);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(emp(i, i), m.sigma()(i, i), 0.05 * m.sigma()(i, i));
  EXPECT_LT((emp - m.sigma()).cwiseAbs().maxCoeff(), 0.05 * m.sigma().diagonal().maxCoeff());
}

TEST(Sample, ReproducibleAndThreadIndependent) {
  const auto m = small_family();
  const auto a = sample(m, 1000, 9, 1);
  const auto b = sample(m, 1000, 9, 4);
  const auto c = sample(m, 1000, 10, 1);
  EXPECT_EQ(a.angles, b.angles);
  EXPECT_NE(a.angles, c.angles);
}

TEST(Sample, RejectsZeroDraws) { EXPECT_THROW(sample(small_family(), 0, 0), InvalidArgument); }

TEST(Sample, NonPsdCovarianceFailsCholesky) {
  const auto m = CylindricalMeasure::gaussian(spaced_squares(2), diag({1.0, -1.0}));
  EXPECT_THROW(sample(m, 10, 0), CholeskyFailure);
}

TEST(Measure, DimensionChecks) {
  EXPECT_THROW(CylindricalMeasure::gaussian(spaced_squares(2), Eigen::MatrixXd::Identity(3, 3)),
               DimensionMismatch);
  EXPECT_THROW(CylindricalMeasure::gaussian(spaced_squares(2), Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::VectorXd::Zero(3)),
               DimensionMismatch);
}

TEST(Translate, EmptyFieldLeavesMeasure) {
  const auto m = small_family();
  EXPECT_EQ(pushforward_translate(m, TestField{}).mean, m.mean);
}

TEST(Translate, InverseRestoresMean) {
  const auto m = small_family();
  const TestField l = nearby_field();
  const auto back = pushforward_translate(pushforward_translate(m, l), -l);
  EXPECT_LT((back.mean - m.mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(back.sigma(), m.sigma());
}

TEST(Translate, HaarIsInvariant) {
  const auto m = CylindricalMeasure::haar(spaced_squares(2));
  EXPECT_FALSE(pushforward_translate(m, nearby_field()).is_gaussian());
}

TEST(Translate, CharFunctionalPicksUpPhase) {
  const auto m = small_family();
  const TestField l = nearby_field();
  const auto moved = pushforward_translate(m, l);
  const Hoop h = hoop_compose(m.family[0], hoop_power(m.family[2], 2));
  const Eigen::VectorXd c = to_vector(family_coordinates(m.family, h));
  const double phase =
      shift_coefficient(l, m.family[0], kHalf) + 2 * shift_coefficient(l, m.family[2], kHalf);
  const auto expected = std::polar(1.0, phase) * char_functional(m, h);
  EXPECT_LT(std::abs(char_functional(moved, h) - expected), 1e-7);
  EXPECT_LT(std::abs(char_functional(moved, c) - expected), 1e-7);
}

TEST(TranslateByAngles, ZeroShiftAndModulation) {
  const auto m = small_family();
  EXPECT_EQ(translate_by_angles(m, Eigen::VectorXd::Zero(3)).mean, m.mean);
  const Eigen::VectorXd delta = Eigen::VectorXd::Constant(3, std::numbers::pi);
  const auto moved = translate_by_angles(m, delta);
  Eigen::VectorXd c(3);
  c << 1, 2, -1;
  EXPECT_LT(std::abs(char_functional(moved, c) - std::polar(1.0, c.dot(delta)) * char_functional(m, c)), 1e-12);
  EXPECT_THROW(translate_by_angles(m, Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST(TranslateByAngles, HaarLawUnchanged) {
  // Kolmogorov-Smirnov on rotated Haar draws against the uniform law.
  const auto m = CylindricalMeasure::haar(spaced_squares(1));
  EXPECT_FALSE(translate_by_angles(m, Eigen::VectorXd::Constant(1, 1.3)).is_gaussian());
  const std::size_t N = 10000;
  const auto s = sample(translate_by_angles(m, Eigen::VectorXd::Constant(1, 1.3)), N, 11);
  std::vector<double> u(N);
  for (std::size_t d = 0; d < N; ++d) u[d] = wrap_angle(s.angles(static_cast<Eigen::Index>(d), 0) + 1.3) / kTwoPi;
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t d = 0; d < N; ++d)
    ks = std::max({ks, std::abs(u[d] - static_cast<double>(d) / N), std::abs(u[d] - static_cast<double>(d + 1) / N)});
  // p > 0.01 corresponds to sqrt(N) D < 1.628
  EXPECT_LT(std::sqrt(static_cast<double>(N)) * ks, 1.628);
}

TEST(WrappedGaussian, NormalizesOnTorus) {
  const WrappedGaussian w(Eigen::VectorXd::Constant(1, 1.0), diag({2.5}), 3);
  const double mass = oracle::integrate([&](double t) { return w.density(Eigen::VectorXd::Constant(1, t)); },
                                        0.0, kTwoPi, 64, 16);
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(WrappedGaussian, PeriodicInEachCoordinate) {
  Eigen::MatrixXd s(2, 2);
  s << 0.5, 0.1, 0.1, 0.3;
  const WrappedGaussian w(Eigen::VectorXd::Zero(2), s, 3);
  Eigen::VectorXd p(2);
  p << 0.4, -1.0;
  Eigen::VectorXd q = p;
  q[1] += kTwoPi;
  EXPECT_NEAR(w.log_density(p), w.log_density(q), 1e-12);
  EXPECT_TRUE(w.full_lattice());
}

TEST(WrappedGaussian, LargeFamilyUsesAxisShifts) {
  const WrappedGaussian w(Eigen::VectorXd::Zero(8), Eigen::MatrixXd::Identity(8, 8) * 0.2, 3);
  EXPECT_FALSE(w.full_lattice());
  EXPECT_LT(w.truncation_bound(), 1e-10);
  EXPECT_THROW(WrappedGaussian(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2), 3), SingularCovariance);
  EXPECT_THROW(WrappedGaussian(Eigen::VectorXd::Zero(1), diag({1.0}), 0), InvalidArgument);
  EXPECT_THROW(w.log_density(Eigen::VectorXd::Zero(3)), DimensionMismatch);
}

TEST(RnDensity, EmptyFieldIsOne) {
  const auto m = small_family();
  EXPECT_NEAR(rn_density(m, TestField{}, Eigen::VectorXd::Constant(3, 0.7)), 1.0, 1e-15);
}

TEST(RnDensity, PositiveEverywhere) {
  const auto m = small_family();
  const Eigen::VectorXd c = shift_vector(nearby_field(2.0), m.family, kHalf);
  CounterRng rng(12, 0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd p(3);
    for (int k = 0; k < 3; ++k) p[k] = kTwoPi * rng.uniform();
    EXPECT_GT(rn_density(m, c, p), 0.0);
  }
}

TEST(RnDensity, MeanOneAndChangeOfVariables) {
  const auto m = small_family();
  const TestField l = nearby_field();
  const Eigen::VectorXd c = shift_vector(l, m.family, kHalf);
  const std::size_t N = 100000;
  const auto s = sample(m, N, 13);
  double s1 = 0, s2 = 0, g1 = 0, g2 = 0;
  for (Eigen::Index d = 0; d < s.angles.rows(); ++d) {
    const Eigen::VectorXd th = s.angles.row(d).transpose();
    const double rho = rn_density(m, c, th);
    s1 += rho;
    s2 += rho * rho;
    g1 += rho * std::cos(th[0]);
    g2 += rho * rho * std::cos(th[0]) * std::cos(th[0]);
  }
  const double mean = s1 / N, se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_LT(std::abs(mean - 1.0), 3 * se);
  const double gm = g1 / N, gse = std::sqrt((g2 / N - gm * gm) / N);
  const double exact = std::real(char_functional(pushforward_translate(m, l), Eigen::VectorXd::Unit(3, 0)));
  EXPECT_LT(std::abs(gm - exact), 3 * gse);
}

TEST(Hellinger, EqualMeasuresGiveOne) {
  const auto m = small_family();
  EXPECT_EQ(hellinger_affinity(m, m).affinity, 1.0);
  const auto h = CylindricalMeasure::haar(m.family);
  EXPECT_EQ(hellinger_affinity(h, h).affinity, 1.0);
}

TEST(Hellinger, OneDimensionalNormals) {
  const auto fam = spaced_squares(1);
  const auto a = CylindricalMeasure::gaussian(fam, diag({1.0}));
  const auto b = CylindricalMeasure::gaussian(fam, diag({4.0}));
  EXPECT_NEAR(hellinger_affinity(a, b).affinity, std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(hellinger_affinity(a, b).affinity, oracle::hellinger_1d(1.0, 2.0), 1e-10);
  EXPECT_NEAR(0.894427, std::sqrt(0.8), 1e-6);
}

TEST(Hellinger, ProductOverIndependentCoordinates) {
  const auto fam = spaced_squares(2);
  const auto a = CylindricalMeasure::gaussian(fam, diag({1.0, 0.5}));
  const auto b = CylindricalMeasure::gaussian(fam, diag({4.0, 0.2}));
  const double one = hellinger_affinity(CylindricalMeasure::gaussian(spaced_squares(1), diag({1.0})),
                                        CylindricalMeasure::gaussian(spaced_squares(1), diag({4.0})))
                         .affinity;
  const double two = hellinger_affinity(CylindricalMeasure::gaussian(spaced_squares(1), diag({0.5})),
                                        CylindricalMeasure::gaussian(spaced_squares(1), diag({0.2})))
                         .affinity;
  EXPECT_NEAR(hellinger_affinity(a, b).affinity, one * two, 1e-10);
}

TEST(Hellinger, AppendingCoordinateDecreasesAffinity) {
  const auto a2 = CylindricalMeasure::gaussian(spaced_squares(2), diag({1.0, 0.5}));
  const auto b2 = CylindricalMeasure::gaussian(spaced_squares(2), diag({4.0, 0.2}));
  const auto a3 = CylindricalMeasure::gaussian(spaced_squares(3), diag({1.0, 0.5, 0.3}));
  const auto b3 = CylindricalMeasure::gaussian(spaced_squares(3), diag({4.0, 0.2, 0.31}));
  EXPECT_LT(hellinger_affinity(a3, b3).affinity, hellinger_affinity(a2, b2).affinity);
}

TEST(Hellinger, MeanShiftReducesAffinity) {
  const auto fam = spaced_squares(1);
  const auto a = CylindricalMeasure::gaussian(fam, diag({1.0}));
  const auto b = CylindricalMeasure::gaussian(fam, diag({1.0}), Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_NEAR(hellinger_affinity(a, b).affinity, std::exp(-1.0 / 8.0), 1e-15);
}

TEST(Hellinger, GaussianVersusHaar) {
  const auto fam = spaced_squares(1);
  const auto g = CylindricalMeasure::gaussian(fam, diag({0.3}));
  const auto h = CylindricalMeasure::haar(fam);
  const double direct = oracle::integrate(
      [](double x) {
        double w = 0.0;
        for (int k = -5; k <= 5; ++k) w += std::exp(-0.5 * std::pow(x + kTwoPi * k, 2) / 0.3);
        w /= std::sqrt(kTwoPi * 0.3);
        return std::sqrt(w / kTwoPi);
      },
      -std::numbers::pi, std::numbers::pi, 200, 16);
  EXPECT_NEAR(hellinger_affinity(g, h).affinity, direct, 1e-10);
  EXPECT_NEAR(hellinger_affinity(h, g).affinity, direct, 1e-10);
}

TEST(Hellinger, CorrelatedFamilyAgainstHaarThrows) {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.5, 0.5, 1.0;
  const auto g = CylindricalMeasure::gaussian(spaced_squares(2), s);
  EXPECT_THROW(hellinger_affinity(g, CylindricalMeasure::haar(g.family)), FamilyNotDecorrelated);
  EXPECT_THROW(hellinger_affinity(g, CylindricalMeasure::haar(spaced_squares(3))), DimensionMismatch);
}
