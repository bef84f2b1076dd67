#include "powerlaw/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace powerlaw {

Trajectory run_trajectory(const GalerkinSystem& system, const Eigen::VectorXd& initial, const SdeStepConfig& cfg,
                          int steps, WienerPath path, int trajectory_id) {
  if (steps < 0) throw std::invalid_argument("step count must be >= 0");
  cfg.validate();
  path.dt = cfg.dt;
  path.K = system.noise().K;

  Trajectory traj;
  traj.seed = path.seed;
  traj.path = path;
  traj.cfg = cfg;
  traj.times.reserve(steps + 1);
  traj.coeffs.reserve(steps + 1);

  VelocityState state{initial, 0.0};
  traj.times.push_back(0.0);
  traj.coeffs.push_back(initial);
  traj.integrals.push_back(system.integrals(initial));
  for (int n = 0; n < steps; ++n) {
    StepResult r;
    try {
      r = system.step(state, cfg, path.increments(n));
    } catch (const IntegratorError& e) {
      throw TrajectoryFailure("trajectory " + std::to_string(trajectory_id) + " step " + std::to_string(n) + ": " +
                                  e.what(),
                              trajectory_id, n);
    }
    // Times are multiples of dt to avoid drift from repeated addition.
    r.state.time = (n + 1) * cfg.dt;
    state = r.state;
    traj.times.push_back(state.time);
    traj.coeffs.push_back(state.coeffs);
    traj.integrals.push_back(system.integrals(state.coeffs));
    traj.dbeta.push_back(std::move(r.dbeta));
    traj.dissipation.push_back(r.dissipation);
    traj.stabilization.push_back(r.stabilization);
    traj.forcing_work.push_back(r.forcing_work);
    traj.martingale.push_back(r.martingale);
    traj.quadratic_variation.push_back(r.quadratic_variation);
    traj.newton_iterations.push_back(r.newton_iterations);
  }
  return traj;
}

std::vector<Trajectory> EnsembleRun::take_all() && {
  std::vector<Trajectory> out;
  out.reserve(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (!trajectories[i]) {
      throw TrajectoryFailure(failures.empty() ? "trajectory failed" : failures.front(), static_cast<int>(i), -1);
    }
    out.push_back(std::move(*trajectories[i]));
  }
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("POWERLAW_SPDE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = cap;
  }
  return std::max(1, n);
}

EnsembleRun run_ensemble(const GalerkinSystem& system, const Eigen::VectorXd& initial, const SdeStepConfig& cfg,
                         int steps, std::uint64_t seed_base, int n_traj, int substeps) {
  if (n_traj < 1) throw std::invalid_argument("ensemble size must be >= 1");
  EnsembleRun run;
  run.trajectories.resize(n_traj);
  std::vector<std::string> errors(n_traj);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1)) {
      WienerPath path;
      path.seed = derive_seed(seed_base, static_cast<std::uint64_t>(i));
      path.substeps = substeps;
      try {
        run.trajectories[i] = run_trajectory(system, initial, cfg, steps, path, i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::min(worker_count(), n_traj);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) run.failures.push_back(e);
  return run;
}

}  // namespace powerlaw
