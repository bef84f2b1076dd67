#pragma once

#include <vector>

#include "powerlaw/galerkin_system.hpp"
#include "powerlaw/grid.hpp"
#include "powerlaw/trajectory.hpp"

namespace powerlaw {

// pi_H = -Delta^{-1} div div H with zero mean; int pi_H Laplace(phi) = -int H : grad^2 phi.
ScalarField solve_pi_H(const GalerkinSpace& space, const MatrixField& H);

// -Delta^{-1} div(sum_l Phi(v) e_l dbeta_l) for one step.
ScalarField pi_Phi_increment(const GalerkinSystem& system, const Eigen::VectorXd& coeffs,
                             const Eigen::VectorXd& dbeta);

// Cumulative stochastic pressure after `steps` steps of the trajectory (left-point rule).
ScalarField solve_pi_Phi(const GalerkinSystem& system, const Trajectory& trajectory, int steps);

// H = H1 + H2 with H1 = S(eps(v)) and H2 = -v (x) v - grad Delta^{-1}(s(v) - f), so that
// int H : grad phi = int S : grad phi - int v (x) v : grad phi + int (s - f) . phi
// for mean-zero phi. load_mean holds the spatial mean of s(v) - f, which a
// gradient of a periodic potential cannot represent.
struct HParts {
  MatrixField stress;
  MatrixField transport;
  std::vector<double> load_mean;

  MatrixField total() const {
    MatrixField h = stress;
    h += transport;
    return h;
  }
};

HParts assemble_H(const GalerkinSystem& system, const Eigen::VectorXd& coeffs, double t);

// pi = pi_h + pi_Phi + int pi_H, one entry per recorded state.
// On the torus pi_h is identically zero.
struct PressureDecomposition {
  std::vector<double> times;
  std::vector<ScalarField> pi_h;
  std::vector<ScalarField> pi_H;
  std::vector<ScalarField> pi_Phi;
  std::vector<ScalarField> pi_1;  // from H1 (stress)
  std::vector<ScalarField> pi_2;  // from H2 (convection, stabilizer, forcing)

  // pi_h + pi_Phi + int_0^t pi_H (trapezoidal in time) at state n.
  ScalarField total(int n) const;
};

PressureDecomposition decompose(const GalerkinSystem& system, const Trajectory& trajectory);

// Absolute residual at state n of
//   int v(t) . phi + int_0^t int H : grad phi + int_0^t int pi_H div phi
//     + int pi_Phi(t) div phi - int v0 . phi - int int_0^t Phi dW . phi
// for an arbitrary (non-solenoidal) test field phi. The pressure enters with
// the sign fixed by its defining identities above. Deterministic time
// integrals use the trapezoidal rule; the stochastic one uses the left point.
double weak_residual(const GalerkinSystem& system, const Trajectory& trajectory,
                     const PressureDecomposition& decomposition, const GridField& test_field, int n);

// Monte Carlo sides of
//   E int_Q |pi_H|^s       <= c E int_Q |H|^s
//   E sup_t int |pi_Phi|^2 <= c E sup_t ||Phi||_{L2(U, L2)}^2
//   E sup_t int |pi_h|^chi <= c E[1 + sup |v|^2 + sup ||Phi||^2 + |v0|^2 + int_Q |H|^s]
// with s = p' and chi = min{2, s}. Ratios are 0 when both sides vanish.
struct EstimateReport {
  double s = 2.0;
  double chi = 2.0;
  int n_traj = 0;
  double lhs_H = 0.0, rhs_H = 0.0, ratio_H = 0.0;
  double lhs_Phi = 0.0, rhs_Phi = 0.0, ratio_Phi = 0.0;
  double lhs_h = 0.0, rhs_h = 0.0, ratio_h = 0.0;
};

EstimateReport estimate_check(const GalerkinSystem& system, const std::vector<Trajectory>& trajectories);

}  // namespace powerlaw
