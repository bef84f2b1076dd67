#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "powerlaw/constitutive.hpp"

using namespace powerlaw;

namespace {

SmallMatrix random_symmetric(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal;
  SmallMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng);
  return 0.5 * (a + a.transpose());
}

SmallMatrix unit_diag() {
  SmallMatrix e(2, 2);
  e << 1.0, 0.0, 0.0, -1.0;
  return e / std::sqrt(2.0);
}

}  // namespace

TEST(Constitutive, NewtonianStressIsLinear) {
  const auto params = ConstitutiveParams::make(2, 2.0, 0.7, 0.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const SmallMatrix e = random_symmetric(rng, 2);
    EXPECT_LE((eval_stress(params, e) - 0.7 * e).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_EQ(eval_stress(params, SmallMatrix::Zero(2, 2)).norm(), 0.0);
}

TEST(Constitutive, ShearThinningUnitStrain) {
  // (1 + 1)^{-0.4}
  const auto params = ConstitutiveParams::make(2, 1.6, 1.0, 0.0);
  const SmallMatrix e = unit_diag();
  EXPECT_NEAR(frobenius_norm(e), 1.0, 1e-15);
  const SmallMatrix s = eval_stress(params, e);
  EXPECT_NEAR(s(0, 0) / e(0, 0), 0.7578582832551990, 1e-12);
}

TEST(Constitutive, RejectsNonSymmetricStrain) {
  const auto params = ConstitutiveParams::make(2, 1.6, 1.0, 0.0);
  SmallMatrix e(2, 2);
  e << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(eval_stress(params, e), std::invalid_argument);
}

TEST(Constitutive, PotentialClosedForms) {
  const auto newtonian = ConstitutiveParams::make(2, 2.0, 1.3, 0.0);
  std::mt19937_64 rng(5);
  const SmallMatrix e = random_symmetric(rng, 2);
  EXPECT_NEAR(stress_potential(newtonian, e), 1.3 * e.squaredNorm() / 2.0, 1e-13);
  EXPECT_EQ(stress_potential(newtonian, SmallMatrix::Zero(2, 2)), 0.0);

  // int_1^2 u^{-0.4} (u - 1) du after u = 1 + s
  const auto thin = ConstitutiveParams::make(2, 1.6, 1.0, 0.0);
  const double oracle = (std::pow(2.0, 1.6) - 1.0) / 1.6 - (std::pow(2.0, 0.6) - 1.0) / 0.6;
  EXPECT_NEAR(stress_potential(thin, unit_diag()), oracle, 1e-13);
  EXPECT_NEAR(stress_potential_of_norm(thin, 1.0), oracle, 1e-13);
}

TEST(Constitutive, MonotonicityGap) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3}) {
    for (double p : {1.2, 1.6, 2.0, 2.5, 3.0}) {
      const auto params = ConstitutiveParams::make(d, p, 1.0, 0.0);
      for (int i = 0; i < 500; ++i) {
        const SmallMatrix e1 = random_symmetric(rng, d);
        const SmallMatrix e2 = random_symmetric(rng, d);
        const double gap = monotonicity_gap(params, e1, e2);
        EXPECT_GE(gap, -1e-12);
        if (p == 2.0) EXPECT_NEAR(gap, (e1 - e2).squaredNorm(), 1e-10 * (e1 - e2).squaredNorm());
      }
      const SmallMatrix e = random_symmetric(rng, d);
      EXPECT_EQ(monotonicity_gap(params, e, e), 0.0);
    }
  }
}

TEST(Constitutive, Stabilizer) {
  const auto params = ConstitutiveParams::make(2, 3.0, 1.0, 1.0, 3.0);
  SmallVector v(2);
  v << 2.0, 0.0;
  const SmallVector s = eval_stabilizer(params, v);
  EXPECT_DOUBLE_EQ(s(0), 4.0);
  EXPECT_DOUBLE_EQ(s(1), 0.0);
  EXPECT_EQ(eval_stabilizer(params, SmallVector::Zero(2)).norm(), 0.0);
}

TEST(Constitutive, MinimalStabilizationExponent) {
  EXPECT_NEAR(minimal_stabilization_exponent(1.6), 16.0 / 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(minimal_stabilization_exponent(3.0), 3.0);
  EXPECT_DOUBLE_EQ(minimal_stabilization_exponent(4.0), 3.0);
  EXPECT_NEAR(ConstitutiveParams::make(2, 1.6, 1.0, 1.0).q, 16.0 / 3.0, 1e-14);
  EXPECT_THROW(ConstitutiveParams::make(2, 1.6, 1.0, 1.0, 4.0), std::invalid_argument);
}

TEST(Constitutive, ParameterValidation) {
  EXPECT_THROW(ConstitutiveParams::make(2, 1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ConstitutiveParams::make(2, 2.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ConstitutiveParams::make(2, 2.0, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(ConstitutiveParams::make(1, 2.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Constitutive, ExistenceThresholds) {
  EXPECT_DOUBLE_EQ(existence_threshold(2), 1.5);
  EXPECT_DOUBLE_EQ(existence_threshold(3), 1.6);
  EXPECT_TRUE(ConstitutiveParams::make(2, 1.6, 1.0, 0.0).admissible_for_existence());
  EXPECT_FALSE(ConstitutiveParams::make(3, 1.6, 1.0, 0.0).admissible_for_existence());
}

TEST(Constitutive, GrowthAndCoercivity) {
  std::mt19937_64 rng(13);
  for (double p : {1.6, 2.0, 2.5}) {
    const auto params = ConstitutiveParams::make(3, p, 1.0, 0.0);
    EXPECT_TRUE(growth_bounds_check(params, SmallMatrix::Zero(3, 3)).ok);
    for (int i = 0; i < 2000; ++i) {
      std::uniform_real_distribution<double> expo(-3.0, 3.0);
      const SmallMatrix e = std::pow(10.0, expo(rng)) * random_symmetric(rng, 3);
      const GrowthCheck g = growth_bounds_check(params, e);
      EXPECT_TRUE(g.ok) << "p=" << p;
      EXPECT_LE(g.stress_norm, g.growth_bound * (1.0 + 1e-14));
    }
  }
  EXPECT_DOUBLE_EQ(coercivity_constant(ConstitutiveParams::make(2, 2.0, 1.0, 0.0)), 0.5);
}

TEST(Constitutive, PotentialGradientAndTangentMatchFiniteDifferences) {
  std::mt19937_64 rng(17);
  for (double p : {1.4, 2.0, 2.7}) {
    const auto params = ConstitutiveParams::make(3, p, 1.0, 0.0);
    for (int i = 0; i < 20; ++i) {
      const SmallMatrix e = random_symmetric(rng, 3);
      const SmallMatrix dir = random_symmetric(rng, 3).normalized();
      const double h = 1e-6;
      const double fd = (stress_potential(params, e + h * dir) - stress_potential(params, e - h * dir)) / (2 * h);
      EXPECT_NEAR(fd, (eval_stress(params, e).array() * dir.array()).sum(), 1e-7);
      const SmallMatrix fd_s = (eval_stress(params, e + h * dir) - eval_stress(params, e - h * dir)) / (2 * h);
      Eigen::VectorXd flat(9);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) flat(a * 3 + b) = dir(a, b);
      const Eigen::VectorXd applied = stress_tangent(params, e) * flat;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(applied(a * 3 + b), fd_s(a, b), 1e-7);
    }
  }
}
