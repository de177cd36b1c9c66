#include <gtest/gtest.h>

#include "rfock/random_geometry.hpp"
#include "rfock/representations.hpp"
#include "rfock/singularity_lab.hpp"

using namespace rfock;

namespace {

const SmearingScale kHalf(0.5);

CylindricalMeasure family_measure(Mollifier conv = Mollifier::PaperLiteral) {
  return CylindricalMeasure::fock(make_translated_family(unit_square(), 3, 1.5), kHalf, conv);
}

TestField nearby_field(double w = 0.4) {
  TestField f;
  f.add(w, unit_square(Vec3(0.3, 0.2, 0.5)), SmearingScale(0.5));
  return f;
}

CylinderFunction mixed_state(const CylindricalMeasure& m) {
  CylinderFunction f = CylinderFunction::basis(m.family[0], {0.6, -0.2});
  f.add(hoop_compose(m.family[1], hoop_inverse(m.family[2])), {0.1, 0.7});
  f.add(Hoop::identity(), 0.3);
  return f;
}

}  // namespace

TEST(CylinderFunction, AddingCancelsToZero) {
  CylinderFunction f = CylinderFunction::basis(unit_square(), 2.0);
  f.add(unit_square(), -2.0);
  EXPECT_TRUE(f.is_zero());
}

TEST(HolonomyOp, IdentityAndInverse) {
  const Hoop a = unit_square(Vec3(0, 0, 2));
  const CylinderFunction f = CylinderFunction::basis(unit_square(), {1.0, 2.0});
  EXPECT_EQ(apply_holonomy(f, Hoop::identity()).terms(), f.terms());
  EXPECT_EQ(apply_holonomy(apply_holonomy(f, a), hoop_inverse(a)).terms(), f.terms());
  const auto psi = apply_holonomy(CylinderFunction::one(), a);
  ASSERT_EQ(psi.terms().size(), 1u);
  EXPECT_EQ(psi.terms().begin()->first, a);
}

TEST(HolonomyOp, RepresentsHoopComposition) {
  const Hoop a = unit_square(Vec3(0, 0, 2));
  const Hoop b = unit_square(Vec3(3, 0, 0));
  const CylinderFunction f = CylinderFunction::basis(unit_square());
  EXPECT_EQ(apply_holonomy(apply_holonomy(f, b), a).terms(), apply_holonomy(f, hoop_compose(a, b)).terms());
}

TEST(HaarTranslation, EmptyFieldAndUnitarity) {
  const CylinderFunction f = mixed_state(family_measure());
  EXPECT_EQ(apply_haar_translation(f, TestField{}).terms(), f.terms());
  const auto g = apply_haar_translation(f, nearby_field());
  EXPECT_NEAR(std::abs(haar_inner(g, g) - haar_inner(f, f)), 0.0, 1e-14);
}

TEST(HaarTranslation, CommutatorCoefficientIsLinePairing) {
  const Hoop alpha = unit_square();
  const Hoop h = unit_square(Vec3(0, 0, 1));
  const TestField l = nearby_field();
  const CylinderFunction bra = CylinderFunction::basis(hoop_compose(alpha, h));
  const CylinderFunction ket = CylinderFunction::basis(h);
  const double step = 1e-4;
  auto comm = [&](double t) {
    const TestField lt = l.scaled(t);
    return haar_inner(bra, apply_haar_translation(apply_holonomy(ket, alpha), lt)) -
           haar_inner(bra, apply_holonomy(apply_haar_translation(ket, lt), alpha));
  };
  const Complex fd = (comm(step) - comm(-step)) / (2.0 * step * Complex(0, 1));
  const Complex ratio = fd / haar_inner(bra, apply_holonomy(ket, alpha));
  EXPECT_NEAR(ratio.real(), line_pairing(l, alpha), 1e-6);
  EXPECT_NEAR(ratio.imag(), 0.0, 1e-6);
}

TEST(FockMatrixElement, Normalization) {
  const auto m = family_measure();
  const auto e = fock_matrix_element(CylinderFunction::one(), {}, CylinderFunction::one(), m);
  EXPECT_NEAR(std::abs(e.closed_form - 1.0), 0.0, 1e-15);
}

TEST(FockMatrixElement, HolonomyGivesCharFunctional) {
  const auto m = family_measure();
  const auto e =
      fock_matrix_element(CylinderFunction::one(), {HolonomyOp{m.family[1]}}, CylinderFunction::one(), m);
  EXPECT_NEAR(std::abs(e.closed_form - std::exp(-0.5 * m.sigma()(1, 1))), 0.0, 1e-15);
}

TEST(FockMatrixElement, TranslationMonteCarloAgrees) {
  const auto m = family_measure();
  const CylinderFunction psi = CylinderFunction::basis(m.family[0]);
  const auto e = fock_matrix_element(psi, {TranslationOp{nearby_field()}}, psi, m, 100000, 17);
  EXPECT_LT(std::abs(e.closed_form - e.monte_carlo), 3.0 * e.mc_standard_error);
  EXPECT_GT(e.mc_standard_error, 0.0);
}

TEST(FockMatrixElement, MixedWordMonteCarloAgrees) {
  const auto m = family_measure();
  const CylinderFunction f = mixed_state(m);
  const OpWord word{TranslationOp{nearby_field(0.3)}, HolonomyOp{m.family[2]}, TranslationOp{nearby_field(-0.2)}};
  const auto e = fock_matrix_element(f, word, f, m, 100000, 18);
  EXPECT_LT(std::abs(e.closed_form - e.monte_carlo), 3.0 * e.mc_standard_error + 1e-12);
}

TEST(FockMatrixElement, HoopOutsideSpanThrows) {
  const auto m = family_measure();
  EXPECT_THROW(fock_matrix_element(CylinderFunction::one(), {HolonomyOp{unit_square(Vec3(0, 0, 9))}},
                                   CylinderFunction::one(), m),
               HoopNotInFamilySpan);
}

TEST(FockRepresentation, RequiresPositiveDefiniteGaussian) {
  EXPECT_THROW(FockRepresentation(CylindricalMeasure::haar({unit_square()})), InvalidArgument);
  EXPECT_THROW(FockRepresentation(CylindricalMeasure::gaussian({unit_square()}, Eigen::MatrixXd::Zero(1, 1))),
               SingularCovariance);
}

TEST(FockRepresentation, TranslationIsUnitary) {
  const auto m = family_measure();
  const FockRepresentation rep(m);
  const CylinderFunction f = mixed_state(m);
  const CylinderFunction g = apply_holonomy(mixed_state(m), m.family[1]);
  const Eigen::VectorXd c = rep.shift(nearby_field());
  auto vf = rep.state(f);
  auto vg = rep.state(g);
  rep.apply_translation(vf, c);
  rep.apply_translation(vg, c);
  EXPECT_LT(std::abs(rep.inner(vg, vf) - rep.inner(rep.state(g), rep.state(f))), 1e-8);
}

TEST(FockRepresentation, TranslationsCommute) {
  const auto m = family_measure();
  const FockRepresentation rep(m);
  const CylinderFunction f = mixed_state(m);
  const OpWord ab{TranslationOp{nearby_field(0.5)}, TranslationOp{nearby_field(-0.8).scaled(0.5)}};
  const OpWord ba{TranslationOp{nearby_field(-0.8).scaled(0.5)}, TranslationOp{nearby_field(0.5)}};
  EXPECT_LT(std::abs(rep.closed_form(f, rep.resolve(ab), f) - rep.closed_form(f, rep.resolve(ba), f)), 1e-8);
}

TEST(FockRepresentation, TranslationByZeroIsIdentity) {
  const auto m = family_measure();
  const FockRepresentation rep(m);
  const CylinderFunction f = mixed_state(m);
  EXPECT_LT(std::abs(rep.closed_form(f, rep.resolve({TranslationOp{TestField{}}}), f) -
                     rep.closed_form(f, {}, f)),
            1e-15);
}

TEST(WeylCheck, TrivialCases) {
  const auto m = family_measure();
  const auto states = default_probe_states(m);
  EXPECT_EQ(weyl_check(m.family[0], TestField{}, m, states), 0.0);
  EXPECT_LT(weyl_check(Hoop::identity(), nearby_field(), m, states), 1e-15);
}

TEST(WeylCheck, HoldsForRandomInputs) {
  const auto m = family_measure();
  CounterRng rng(40, 0);
  for (int i = 0; i < 3; ++i) {
    const TestField l = random_test_field(rng);
    const Hoop alpha = hoop_compose(m.family[i % 3], hoop_power(m.family[(i + 1) % 3], -1));
    EXPECT_LT(weyl_check(alpha, l, m, default_probe_states(m)), 1e-8);
  }
}

TEST(GeneratorCheck, EmptyFieldIsZero) {
  const auto m = family_measure();
  EXPECT_EQ(generator_commutator_check(m.family[0], TestField{}, m, 1e-3, default_probe_states(m)), 0.0);
  EXPECT_THROW(generator_commutator_check(m.family[0], nearby_field(), m, 0.0, default_probe_states(m)),
               InvalidArgument);
}

TEST(GeneratorCheck, SecondOrderConvergence) {
  const auto m = family_measure();
  const auto states = default_probe_states(m);
  const TestField l = nearby_field(3.0);
  const double e1 = generator_commutator_check(m.family[0], l, m, 0.1, states);
  const double e2 = generator_commutator_check(m.family[0], l, m, 0.05, states);
  EXPECT_LT(e1, 1e-1);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
  EXPECT_LT(generator_commutator_check(m.family[0], l, m, 1e-3, states), 1e-5);
}

TEST(HaarCommutator, Small) {
  const auto m = family_measure();
  EXPECT_LT(haar_commutator_check(m.family[0], nearby_field(), 1e-3, default_probe_states(m)), 1e-5);
  EXPECT_EQ(haar_commutator_check(m.family[0], TestField{}, 1e-3, default_probe_states(m)), 0.0);
}

TEST(PhaseDistinction, SmearedAndLinePhasesDifferAtLoopScale) {
  // r comparable to the loop size separates the two phases; the r -> 0 trend
  // is covered in the covariance tests.
  const TestField l = nearby_field();
  for (auto conv : {Mollifier::PaperLiteral, Mollifier::UnitNormalized}) {
    const double smeared = shift_coefficient(l, unit_square(), SmearingScale(0.8), conv);
    const double line = line_pairing(l, unit_square(), conv);
    EXPECT_GT(std::abs(smeared - line), 0.05 * std::abs(line));
  }
}
