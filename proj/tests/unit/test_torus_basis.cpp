#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "powerlaw/spectral.hpp"
#include "powerlaw/torus_basis.hpp"

using namespace powerlaw;

namespace {

Eigen::VectorXd random_coeffs(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(n);
  for (auto& x : c) x = normal(rng);
  return c;
}

}  // namespace

TEST(TorusBasis, SingleModeHasUnitEigenvalue) {
  const auto modes = leading_modes(2, 1);
  ASSERT_EQ(modes.size(), 1u);
  EXPECT_EQ(modes[0].norm_sq(), 1);
  EXPECT_DOUBLE_EQ(modes[0].eigenvalue(), 1.0);
}

TEST(TorusBasis, EightModesWithNormSquaredAtMostTwo) {
  const auto modes = enumerate_modes(2, 2);
  EXPECT_EQ(modes.size(), 8u);
  for (const auto& m : modes) {
    EXPECT_LE(m.norm_sq(), 2);
    const int first = m.xi[0] != 0 ? m.xi[0] : m.xi[1];
    EXPECT_GT(first, 0) << "half-space representative";
  }
}

TEST(TorusBasis, ThreeDimensionalModesCarryTwoPolarizations) {
  // xi in {(1,0,0),(0,1,0),(0,0,1)}, two parities, two polarizations.
  EXPECT_EQ(enumerate_modes(3, 1).size(), 12u);
}

TEST(TorusBasis, PolarizationIsUnitAndTransverse) {
  for (int d : {2, 3}) {
    for (const auto& m : enumerate_modes(d, 6)) {
      double dot = 0.0, norm = 0.0;
      for (int i = 0; i < 3; ++i) {
        dot += m.pol[i] * m.xi[i];
        norm += m.pol[i] * m.pol[i];
      }
      EXPECT_NEAR(dot, 0.0, 1e-14);
      EXPECT_NEAR(norm, 1.0, 1e-14);
    }
  }
}

TEST(TorusBasis, GridBounds) {
  // Leading 8 modes in d = 2 reach |xi|_inf = 1.
  EXPECT_EQ(minimal_grid(2, 8), 3);
  EXPECT_EQ(dealiased_grid(2, 8), 4);
  EXPECT_THROW(build_space(2, 8, 2), std::invalid_argument);
  EXPECT_THROW(build_space(4, 8, 8), std::invalid_argument);
  EXPECT_THROW(build_space(2, 0, 8), std::invalid_argument);
}

TEST(TorusBasis, GramMatrixIsIdentity) {
  for (int d : {2, 3}) {
    const int n = d == 2 ? 64 : 24;
    const GalerkinSpace space = build_space(d, n, minimal_grid(d, n));
    const Eigen::MatrixXd gram = space.cell_volume() * space.values().transpose() * space.values();
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10) << "d=" << d;
  }
}

TEST(TorusBasis, ZeroAndUnitCoefficients) {
  const GalerkinSpace space = build_space(2, 6, dealiased_grid(2, 6));
  const GridField zero = space.synthesize(Eigen::VectorXd::Zero(6));
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
  const GridField w1 = space.synthesize(Eigen::VectorXd::Unit(6, 0));
  EXPECT_NEAR(inner(w1, w1), 1.0, 1e-10);
}

TEST(TorusBasis, AnalyzeRecoversModeCombination) {
  const GalerkinSpace space = build_space(2, 6, dealiased_grid(2, 6));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
  c(0) = 1.0;
  c(2) = 0.5;
  EXPECT_LE((space.analyze(space.synthesize(c)) - c).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((space.analyze(space.synthesize(Eigen::VectorXd::Unit(6, 1))) - Eigen::VectorXd::Unit(6, 1))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(TorusBasis, GradientFieldsAreOrthogonalToTheBasis) {
  const GalerkinSpace space = build_space(2, 12, dealiased_grid(2, 12));
  GridField grad(2, space.grid());
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const auto x = grid_point(2, space.grid(), pt);
    // grad of sin(x1) cos(2 x2)
    grad.at(pt)[0] = std::cos(x[0]) * std::cos(2.0 * x[1]);
    grad.at(pt)[1] = -2.0 * std::sin(x[0]) * std::sin(2.0 * x[1]);
  }
  EXPECT_LE(space.analyze(grad).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TorusBasis, ModesOutsideTheSpaceProjectToZero) {
  const GalerkinSpace space = build_space(2, 4, 16);
  WaveMode high;
  high.xi = {3, 2, 0};
  high.pol = {-2.0 / std::sqrt(13.0), 3.0 / std::sqrt(13.0), 0.0};
  EXPECT_LE(space.analyze(space.sample_mode(high)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TorusBasis, DivergenceFreeAndStokesEigenfunctions) {
  const GalerkinSpace space = build_space(2, 20, minimal_grid(2, 20));
  for (int k = 0; k < space.size(); ++k) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(space.size(), k);
    for (double v : space.divergence(e).values) EXPECT_LE(std::abs(v), 1e-10);
    const GridField w = space.synthesize(e);
    for (int i = 0; i < 2; ++i) {
      ScalarField comp(2, space.grid());
      for (std::size_t pt = 0; pt < space.points(); ++pt) comp.values[pt] = w.at(pt)[i];
      const ScalarField lap = spectral::laplacian(comp);
      for (std::size_t pt = 0; pt < space.points(); ++pt)
        EXPECT_NEAR(-lap.values[pt], space.eigenvalue(k) * comp.values[pt], 1e-9);
    }
  }
}

TEST(TorusBasis, SingleModeSymmetricGradientEntries) {
  // xi = (1,0) with pol (0,1), cosine: v = A (0, cos x1), eps_12 = -A sin(x1) / 2.
  const GalerkinSpace space = build_space(2, 4, 9);
  int k = -1;
  for (int i = 0; i < space.size(); ++i) {
    const auto& m = space.mode(i);
    if (m.xi[0] == 1 && m.xi[1] == 0 && m.parity == Parity::kCosine) k = i;
  }
  ASSERT_GE(k, 0);
  const double sign = space.mode(k).pol[1];
  const double A = std::sqrt(2.0) / (2.0 * std::numbers::pi);
  const MatrixField eps = space.symmetric_gradient(Eigen::VectorXd::Unit(space.size(), k));
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const auto x = grid_point(2, space.grid(), pt);
    const double* e = eps.at(pt);
    EXPECT_NEAR(e[0], 0.0, 1e-14);
    EXPECT_NEAR(e[3], 0.0, 1e-14);
    EXPECT_NEAR(e[1], -0.5 * sign * A * std::sin(x[0]), 1e-14);
    EXPECT_NEAR(e[2], e[1], 1e-15);
  }
}

TEST(TorusBasis, SymmetricGradientCarriesHalfTheGradientNorm) {
  const GalerkinSpace space = build_space(2, 16, dealiased_grid(2, 16));
  for (unsigned s = 0; s < 5; ++s) {
    const Eigen::VectorXd c = random_coeffs(space.size(), s);
    const MatrixField eps = space.symmetric_gradient(c);
    const MatrixField grad = space.gradient(c);
    EXPECT_NEAR(inner(eps, eps), 0.5 * inner(grad, grad), 1e-10 * inner(grad, grad));
  }
}

TEST(TorusBasis, CopiesShareTabulatedData) {
  const GalerkinSpace a = build_space(2, 8, 7);
  const GalerkinSpace b = a;
  EXPECT_EQ(&a.values(), &b.values());
}

TEST(TorusBasis, WrongCoefficientLengthThrows) {
  const GalerkinSpace space = build_space(2, 8, 7);
  EXPECT_THROW(space.synthesize(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
