#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "powerlaw/galerkin_system.hpp"
#include "powerlaw/trajectory.hpp"

namespace powerlaw {

// beta = max{2(d+2)/d, p(d+2)/d}
double moment_exponent(int d, double p);
// r0 = p(d+2)/d
double interpolation_exponent(int d, double p);

// Compensated (Neumaier) summation; the result does not depend on how the
// inputs were produced, only on their order.
double neumaier_sum(std::span<const double> values);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error (n - 1 normalisation; zero error for n < 2).
MeanEstimate estimate_mean(std::span<const double> samples);

// Energy functionals of one trajectory. Time integrals use the trapezoidal
// rule over the recorded states; sup_t runs over every recorded state.
struct EnergyRow {
  std::uint64_t seed = 0;
  double sup_l2_sq = 0.0;   // sup_t ||v||^2
  double grad_lp = 0.0;     // int_Q |grad v|^p
  double stab_lq = 0.0;     // alpha int_Q |v|^q
  double interp_lr0 = 0.0;  // int_Q |v|^{r0}
  double v0_l2_sq = 0.0;    // ||v(0)||^2
  double lhs = 0.0;         // sup_l2_sq + grad_lp + stab_lq
  double lhs_beta = 0.0;    // lhs^{beta / 2}
};

EnergyRow energy_row(const GalerkinSystem& system, const Trajectory& trajectory, double beta);

struct EnergyReport {
  double beta = 0.0;
  double r0 = 0.0;
  int n_traj = 0;
  std::vector<EnergyRow> rows;
  MeanEstimate sup_l2_sq, grad_lp, stab_lq, interp_lr0, lhs, lhs_beta;
  double v0_l2_sq = 0.0;         // E ||v0||^2
  double forcing_norm_sq = 0.0;  // ||f||^2_{L2(Q)}
  // lhs / (1 + E||v0||^2 + ||f||^2_{L2(Q)})
  double bound_ratio() const { return lhs.mean / (1.0 + v0_l2_sq + forcing_norm_sq); }
};

EnergyReport summarize_energy(const GalerkinSystem& system, std::span<const Trajectory> trajectories, double beta);

// Runs n_traj >= 2 members with seeds derived from seed_base and reports the
// ensemble moments. A failed member is rethrown as TrajectoryFailure.
EnergyReport ensemble_moments(const GalerkinSystem& system, const Eigen::VectorXd& initial,
                              const SdeStepConfig& cfg, int steps, std::uint64_t seed_base, int n_traj,
                              double beta);

// Discrete Ito identity for 1/2 |C|^2:
//   1/2 |C_n|^2 = 1/2 |C_0|^2 - dissipation - stabilization + forcing work
//                 + martingale + 1/2 quadratic variation  (cumulative sums)
struct ItoCheck {
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;  // |lhs - rhs| per recorded state
  // Cumulative terms at the final state.
  double initial = 0.0;
  double dissipation = 0.0;
  double stabilization = 0.0;
  double forcing_work = 0.0;
  double martingale = 0.0;
  double quadratic_variation = 0.0;
  double max_residual = 0.0;
  double final_residual = 0.0;
};

ItoCheck energy_identity_residual(const Trajectory& trajectory);

// Least-squares slope of log(y) against log(x).
double fit_order(std::span<const double> x, std::span<const double> y);

struct ItoOrderStudy {
  std::vector<double> dts;
  std::vector<double> rms_residual;  // RMS over paths of ItoCheck::max_residual
  double order = 0.0;
};

// Runs n_paths Brownian paths per dt over [0, T]. Paths are coupled across the
// dt grid: every dt must be an integer multiple of the smallest one.
ItoOrderStudy ito_order_study(const GalerkinSystem& system, const Eigen::VectorXd& initial, SdeStepConfig cfg,
                              double T, std::span<const double> dt_grid, int n_paths, std::uint64_t seed_base);

// Empirical d/dt log c(t) of a noise-free run started from the single basis
// mode k, fitted over [0, T]. For p = 2 and no forcing the exact value is
// -nu0 lambda_k / 2.
double single_mode_decay_rate(const GalerkinSystem& system, int k, const SdeStepConfig& cfg, double T);

// Everything an ensemble study varies parameters around.
struct StudySetup {
  ConstitutiveParams params;
  GalerkinSpace space;
  NoiseModel noise;
  Forcing forcing;
  Eigen::VectorXd initial;
  SdeStepConfig cfg;
  int steps = 0;
  std::uint64_t seed = 0;
  int n_traj = 2;
  double beta = 0.0;  // 0 selects moment_exponent(d, p)
};

struct AlphaRow {
  double alpha = 0.0;
  double ratio = 0.0;  // R(alpha)
  MeanEstimate lhs;
};

struct AlphaStudy {
  std::vector<AlphaRow> rows;
  double spread = 0.0;  // max R / min R
};

// Same seeds, N and dt for every alpha; q stays at the setup's value.
AlphaStudy alpha_independence_study(const StudySetup& setup, std::span<const double> alphas);

struct StabilizationRow {
  double m_a = 0.0;
  double m_b = 0.0;
  MeanEstimate difference;  // E ||v^{m_a} - v^{m_b}||^2_{L2(Q)}
};

struct StabilizationStudy {
  std::vector<StabilizationRow> rows;
  bool strictly_decreasing = false;
};

// alpha = 1/m for each m, shared seeds; differences of consecutive m.
StabilizationStudy stabilization_convergence(const StudySetup& setup, std::span<const double> m_grid);

// int_Q |v|^{r0} / ((sup_t ||v||^2)^{p/d} int_Q |grad v|^p + 1)
double interpolation_diagnostic(const GalerkinSystem& system, const Trajectory& trajectory);

// Residual of the weak formulation against the solenoidal test function w
// at every recorded state, with each term evaluated where the integrator
// evaluates it. For w in X_N this is the discrete Galerkin identity; for
// modes outside X_N it measures the truncation error. w must be resolved on
// the grid.
std::vector<double> weak_solution_residual(const GalerkinSystem& system, const Trajectory& trajectory,
                                           const WaveMode& test_mode);

}  // namespace powerlaw
