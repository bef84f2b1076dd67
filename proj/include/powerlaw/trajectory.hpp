#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "powerlaw/galerkin_system.hpp"
#include "powerlaw/noise.hpp"

namespace powerlaw {

// Full history of one simulated path. Index n of `times`/`coeffs`/`integrals`
// is the state after n steps; index n of the per-step vectors refers to the
// step from state n to state n + 1.
struct Trajectory {
  std::uint64_t seed = 0;
  WienerPath path;
  SdeStepConfig cfg;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> coeffs;
  std::vector<StateIntegrals> integrals;

  std::vector<Eigen::VectorXd> dbeta;
  std::vector<double> dissipation;
  std::vector<double> stabilization;
  std::vector<double> forcing_work;
  std::vector<double> martingale;
  std::vector<double> quadratic_variation;
  std::vector<int> newton_iterations;

  int steps() const { return static_cast<int>(times.size()) - 1; }
};

class TrajectoryFailure : public std::runtime_error {
 public:
  TrajectoryFailure(const std::string& what, int trajectory, int step)
      : std::runtime_error(what), trajectory_(trajectory), step_(step) {}
  int trajectory() const { return trajectory_; }
  int step() const { return step_; }

 private:
  int trajectory_;
  int step_;
};

// Integrates `steps` steps from `initial`. The path's dt and K are taken from
// cfg and the system's noise model. Throws TrajectoryFailure naming the step.
Trajectory run_trajectory(const GalerkinSystem& system, const Eigen::VectorXd& initial, const SdeStepConfig& cfg,
                          int steps, WienerPath path, int trajectory_id = 0);

struct EnsembleRun {
  std::vector<std::optional<Trajectory>> trajectories;
  std::vector<std::string> failures;  // "trajectory <id> step <n>: <message>"

  bool complete() const { return failures.empty(); }
  // Throws TrajectoryFailure for the first failed member.
  std::vector<Trajectory> take_all() &&;
};

// Members use seeds derive_seed(seed_base, i) and run on a worker pool capped
// by worker_count(). Results are stored by member index, so the outcome does
// not depend on scheduling.
EnsembleRun run_ensemble(const GalerkinSystem& system, const Eigen::VectorXd& initial, const SdeStepConfig& cfg,
                         int steps, std::uint64_t seed_base, int n_traj, int substeps = 1);

// POWERLAW_SPDE_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

}  // namespace powerlaw
