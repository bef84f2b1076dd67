// Command-line driver: simulate, ensemble, verify, pressure, report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "powerlaw/analysis.hpp"
#include "powerlaw/config.hpp"
#include "powerlaw/output.hpp"
#include "powerlaw/pressure.hpp"
#include "powerlaw/trajectory.hpp"
#include "powerlaw/verification.hpp"

namespace fs = std::filesystem;
using namespace powerlaw;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIntegrator = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::vector<double> alpha_grid;
  std::vector<double> m_grid;
  std::vector<double> dt_grid;
  std::string suite;
};

SimulationConfig load_config(const Options& o) {
  SimulationConfig cfg = SimulationConfig::load(o.config);
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

template <typename T, typename W>
std::string render(W writer, const T& value) {
  std::ostringstream s;
  writer(s, value);
  return s.str();
}

int cmd_simulate(const Options& o) {
  const SimulationConfig cfg = load_config(o);
  const GalerkinSystem sys = cfg.system();
  const Eigen::VectorXd v0 = cfg.initial_coeffs(sys.space());
  WienerPath path;
  path.seed = cfg.seed;
  const Trajectory traj = run_trajectory(sys, v0, cfg.step_config(), cfg.steps(), path, 0);
  const fs::path dir = prepare_out(o);
  write_file((dir / "trajectory.csv").string(), render(write_trajectory_csv, traj));
  write_file((dir / "coefficients.json").string(), coefficients_json(traj).dump(1) + "\n");
  write_file((dir / "config.json").string(), cfg.serialize());
  std::cout << "wrote " << traj.steps() + 1 << " rows to " << (dir / "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_ensemble(const Options& o) {
  const SimulationConfig cfg = load_config(o);
  if (cfg.n_traj < 2) throw ConfigError("n_traj", "ensemble runs need n_traj >= 2");
  const GalerkinSystem sys = cfg.system();
  const Eigen::VectorXd v0 = cfg.initial_coeffs(sys.space());
  const fs::path dir = prepare_out(o);

  EnsembleRun run = run_ensemble(sys, v0, cfg.step_config(), cfg.steps(), cfg.seed, cfg.n_traj);
  std::vector<Trajectory> done;
  for (auto& t : run.trajectories)
    if (t) done.push_back(std::move(*t));
  const EnergyReport rep = summarize_energy(sys, done, cfg.beta.value_or(0.0));
  nlohmann::json doc = energy_report_json(rep);
  doc["partial"] = !run.complete();
  doc["failures"] = run.failures;
  write_file((dir / "energy_report.json").string(), doc.dump(2) + "\n");
  write_file((dir / "energy.csv").string(), render(write_energy_csv, rep));

  if (!o.alpha_grid.empty()) {
    const AlphaStudy study = alpha_independence_study(cfg.study_setup(), o.alpha_grid);
    write_file((dir / "alpha_study.json").string(), alpha_study_json(study).dump(2) + "\n");
    write_file((dir / "alpha_study.csv").string(), render(write_alpha_csv, study));
  }
  if (!o.m_grid.empty()) {
    const StabilizationStudy study = stabilization_convergence(cfg.study_setup(), o.m_grid);
    write_file((dir / "m_study.json").string(), stabilization_study_json(study).dump(2) + "\n");
    write_file((dir / "m_study.csv").string(), render(write_stabilization_csv, study));
  }
  for (const auto& f : run.failures) std::cerr << "failed: " << f << "\n";
  std::cout << "ensemble of " << cfg.n_traj << " trajectories, " << done.size() << " completed\n";
  return run.complete() ? 0 : kExitIntegrator;
}

int cmd_verify(const Options& o) {
  VerifyOptions vo;
  if (!o.dt_grid.empty()) vo.dt_grid = o.dt_grid;
  std::vector<std::string> suites;
  if (o.suite.empty() || o.suite == "all") {
    suites = suite_names();
  } else {
    suites = {o.suite};
  }
  for (const auto& s : suites) {
    bool known = false;
    for (const auto& n : suite_names()) known = known || n == s;
    if (!known) {
      std::cerr << "unknown suite '" << s << "'\n";
      return kExitInvalid;
    }
  }
  nlohmann::json reports = nlohmann::json::array();
  bool ok = true;
  for (const auto& s : suites) {
    const SuiteReport rep = run_suite(s, vo);
    ok = ok && rep.passed();
    reports.push_back(rep.to_json());
  }
  const nlohmann::json doc = suites.size() == 1 ? reports.front() : reports;
  std::cout << doc.dump(2) << "\n";
  if (!o.out.empty() && o.out != ".") {
    const fs::path dir = prepare_out(o);
    write_file((dir / "verify.json").string(), doc.dump(2) + "\n");
  }
  return ok ? 0 : kExitFailed;
}

int cmd_pressure(const Options& o) {
  const SimulationConfig cfg = load_config(o);
  const GalerkinSystem sys = cfg.system();
  const Eigen::VectorXd v0 = cfg.initial_coeffs(sys.space());
  const fs::path dir = prepare_out(o);
  EnsembleRun run = run_ensemble(sys, v0, cfg.step_config(), cfg.steps(), cfg.seed, cfg.n_traj);
  std::vector<Trajectory> trajs = std::move(run).take_all();

  const PressureDecomposition dec = decompose(sys, trajs.front());
  std::ostringstream table;
  table << "step,t,pi_H_l2,pi_1_l2,pi_2_l2,pi_Phi_l2,pi_h_l2\n";
  for (std::size_t n = 0; n < dec.times.size(); ++n) {
    table << n << ',' << format_double(dec.times[n]) << ',' << format_double(std::sqrt(inner(dec.pi_H[n], dec.pi_H[n])))
          << ',' << format_double(std::sqrt(inner(dec.pi_1[n], dec.pi_1[n]))) << ','
          << format_double(std::sqrt(inner(dec.pi_2[n], dec.pi_2[n]))) << ','
          << format_double(std::sqrt(inner(dec.pi_Phi[n], dec.pi_Phi[n]))) << ','
          << format_double(std::sqrt(inner(dec.pi_h[n], dec.pi_h[n]))) << '\n';
  }
  write_file((dir / "pressure.csv").string(), table.str());
  write_file((dir / "pressure_estimates.json").string(), estimate_report_json(estimate_check(sys, trajs)).dump(2) + "\n");
  std::cout << "pressure decomposition of " << dec.times.size() << " states written to " << dir.string() << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  const SimulationConfig cfg = load_config(o);
  const ConstitutiveParams params = cfg.constitutive();
  const NoiseModel noise = cfg.noise();
  nlohmann::json doc;
  doc["config"] = cfg.to_json();
  doc["q"] = params.q;
  doc["alpha"] = params.alpha;
  doc["conjugate_exponent"] = params.conjugate_exponent();
  doc["existence_threshold"] = existence_threshold(cfg.d);
  doc["admissible_for_existence"] = params.admissible_for_existence();
  doc["beta"] = cfg.beta.value_or(moment_exponent(cfg.d, cfg.p));
  doc["r0"] = interpolation_exponent(cfg.d, cfg.p);
  doc["grid"] = cfg.grid();
  doc["steps"] = cfg.steps();
  doc["noise_growth_constant"] = noise.growth_constant();
  doc["noise_decay_constant"] = noise.decay_constant();
  doc["noise_truncation_tail"] = noise.truncation_tail();
  std::cout << doc.dump(2) << "\n";
  if (!o.out.empty() && o.out != ".") write_file((prepare_out(o) / "report.json").string(), doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic power-law fluid solver on the periodic torus"};
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON run configuration")->required();
    cmd->add_option("--seed", o.seed, "override the configured seed");
    cmd->add_option("--out", o.out, "output directory");
  };
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory and write CSV/JSON histories");
  add_config(simulate);
  auto* ensemble = app.add_subcommand("ensemble", "run an ensemble and report energy moments");
  add_config(ensemble);
  ensemble->add_option("--alpha-grid", o.alpha_grid, "alpha values for the alpha-independence study")->delimiter(',');
  ensemble->add_option("--m-grid", o.m_grid, "m values (alpha = 1/m) for the stabilization study")->delimiter(',');
  auto* verify = app.add_subcommand("verify", "run a property suite and print a JSON report");
  verify->add_option("--suite", o.suite, "constitutive, basis, noise, truncation, pressure, ito, energy or all");
  verify->add_option("--dt-grid", o.dt_grid, "time steps for the ito suite")->delimiter(',');
  verify->add_option("--out", o.out, "output directory");
  auto* pressure = app.add_subcommand("pressure", "reconstruct the pressure decomposition of a run");
  add_config(pressure);
  auto* report = app.add_subcommand("report", "print derived parameters of a configuration");
  add_config(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*ensemble) return cmd_ensemble(o);
    if (*verify) return cmd_verify(o);
    if (*pressure) return cmd_pressure(o);
    if (*report) return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const TrajectoryFailure& e) {
    std::cerr << "integrator failure: " << e.what() << "\n";
    return kExitIntegrator;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitFailed;
}
