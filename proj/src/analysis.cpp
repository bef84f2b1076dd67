#include "powerlaw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace powerlaw {

namespace {

// Trapezoidal rule over recorded states.
template <typename F>
double time_integral(const Trajectory& traj, F&& integrand) {
  std::vector<double> pieces;
  pieces.reserve(traj.times.size());
  double prev = integrand(0);
  for (int n = 1; n <= traj.steps(); ++n) {
    const double cur = integrand(n);
    pieces.push_back(0.5 * (traj.times[n] - traj.times[n - 1]) * (prev + cur));
    prev = cur;
  }
  return neumaier_sum(pieces);
}

double final_time(const Trajectory& traj) { return traj.times.back(); }

std::vector<Trajectory> run_members(const GalerkinSystem& system, const Eigen::VectorXd& initial,
                                    const SdeStepConfig& cfg, int steps, std::uint64_t seed_base, int n_traj,
                                    int substeps = 1) {
  return run_ensemble(system, initial, cfg, steps, seed_base, n_traj, substeps).take_all();
}

// Values and gradient of one basis function at a grid point.
struct ModeSample {
  std::vector<double> value;  // d
  std::vector<double> grad;   // d * d, (i, j) -> d_j w_i
};

std::vector<ModeSample> tabulate_mode(const GalerkinSpace& space, const WaveMode& mode) {
  const int d = space.dim();
  if (2 * mode.max_component() + 1 > space.grid()) {
    throw std::invalid_argument("test mode is not resolved on the collocation grid");
  }
  const double amp = std::sqrt(2.0 / std::pow(2.0 * std::numbers::pi, d));
  std::vector<ModeSample> out(space.points());
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const auto x = grid_point(d, space.grid(), pt);
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += mode.xi[a] * x[a];
    const bool cosine = mode.parity == Parity::kCosine;
    const double val = cosine ? std::cos(phase) : std::sin(phase);
    const double dval = cosine ? -std::sin(phase) : std::cos(phase);
    ModeSample& s = out[pt];
    s.value.resize(d);
    s.grad.resize(d * d);
    for (int i = 0; i < d; ++i) {
      s.value[i] = amp * mode.pol[i] * val;
      for (int j = 0; j < d; ++j) s.grad[i * d + j] = amp * mode.pol[i] * mode.xi[j] * dval;
    }
  }
  return out;
}

struct TestPairings {
  double velocity = 0.0;    // int v . w
  double stress = 0.0;      // int S(eps(v)) : grad w
  double stabilizer = 0.0;  // alpha int |v|^{q-2} v . w
  double convection = 0.0;  // int v (x) v : grad w
  std::vector<double> noise;  // int g_l(v) . w, l = 1..K
};

TestPairings pair_with_mode(const GalerkinSystem& system, const Eigen::VectorXd& coeffs,
                            const std::vector<ModeSample>& w, bool with_noise) {
  const GalerkinSpace& space = system.space();
  const ConstitutiveParams& params = system.params();
  const NoiseModel& noise = system.noise();
  const int d = space.dim();
  const GridField v = space.synthesize(coeffs);
  const MatrixField eps = space.symmetric_gradient(coeffs);
  TestPairings out;
  out.noise.assign(with_noise ? noise.K : 0, 0.0);
  SmallVector xi(d);
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const double* u = v.at(pt);
    const double* e = eps.at(pt);
    const ModeSample& s = w[pt];
    double en2 = 0.0, un2 = 0.0;
    for (int i = 0; i < d * d; ++i) en2 += e[i] * e[i];
    for (int i = 0; i < d; ++i) un2 += u[i] * u[i];
    const double a = params.nu0 * std::pow(1.0 + std::sqrt(en2), params.p - 2.0);
    const double sa = (params.alpha > 0.0 && un2 > 0.0) ? params.alpha * std::pow(un2, 0.5 * (params.q - 2.0)) : 0.0;
    for (int i = 0; i < d; ++i) {
      out.velocity += u[i] * s.value[i];
      out.stabilizer += sa * u[i] * s.value[i];
      for (int j = 0; j < d; ++j) {
        out.stress += a * e[i * d + j] * s.grad[i * d + j];
        out.convection += u[i] * u[j] * s.grad[i * d + j];
      }
    }
    if (with_noise) {
      for (int i = 0; i < d; ++i) xi(i) = u[i];
      for (int l = 1; l <= noise.K; ++l) {
        const SmallVector g = eval_g(noise, l, xi);
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += g(i) * s.value[i];
        out.noise[l - 1] += dot;
      }
    }
  }
  const double cv = space.cell_volume();
  out.velocity *= cv;
  out.stress *= cv;
  out.stabilizer *= cv;
  out.convection *= cv;
  for (double& x : out.noise) x *= cv;
  return out;
}

double forcing_pairing(const GalerkinSystem& system, double t, const std::vector<ModeSample>& w) {
  const GridField* f = system.forcing().at(t);
  if (!f) return 0.0;
  const int d = system.space().dim();
  double sum = 0.0;
  for (std::size_t pt = 0; pt < w.size(); ++pt)
    for (int i = 0; i < d; ++i) sum += f->at(pt)[i] * w[pt].value[i];
  return sum * system.space().cell_volume();
}

}  // namespace

double moment_exponent(int d, double p) { return std::max(2.0 * (d + 2.0) / d, p * (d + 2.0) / d); }

double interpolation_exponent(int d, double p) { return p * (d + 2.0) / d; }

double neumaier_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

MeanEstimate estimate_mean(std::span<const double> samples) {
  MeanEstimate est;
  const std::size_t n = samples.size();
  if (n == 0) return est;
  est.mean = neumaier_sum(samples) / static_cast<double>(n);
  if (n < 2) return est;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (samples[i] - est.mean) * (samples[i] - est.mean);
  const double var = neumaier_sum(sq) / static_cast<double>(n - 1);
  est.std_error = std::sqrt(var / static_cast<double>(n));
  return est;
}

EnergyRow energy_row(const GalerkinSystem& system, const Trajectory& traj, double beta) {
  if (traj.integrals.size() != traj.times.size()) throw std::invalid_argument("trajectory is missing its integrals");
  EnergyRow row;
  row.seed = traj.seed;
  for (const auto& in : traj.integrals) row.sup_l2_sq = std::max(row.sup_l2_sq, in.l2_sq);
  row.grad_lp = time_integral(traj, [&](int n) { return traj.integrals[n].grad_lp; });
  row.stab_lq = system.params().alpha * time_integral(traj, [&](int n) { return traj.integrals[n].lq; });
  row.interp_lr0 = time_integral(traj, [&](int n) { return traj.integrals[n].lr0; });
  row.v0_l2_sq = traj.integrals.front().l2_sq;
  row.lhs = row.sup_l2_sq + row.grad_lp + row.stab_lq;
  row.lhs_beta = std::pow(row.lhs, 0.5 * beta);
  return row;
}

EnergyReport summarize_energy(const GalerkinSystem& system, std::span<const Trajectory> trajectories, double beta) {
  const int d = system.space().dim();
  const double p = system.params().p;
  EnergyReport rep;
  rep.beta = beta > 0.0 ? beta : moment_exponent(d, p);
  rep.r0 = interpolation_exponent(d, p);
  rep.n_traj = static_cast<int>(trajectories.size());
  if (trajectories.empty()) return rep;
  for (const auto& t : trajectories) rep.rows.push_back(energy_row(system, t, rep.beta));
  auto column = [&](double EnergyRow::* field) {
    std::vector<double> xs;
    xs.reserve(rep.rows.size());
    for (const auto& r : rep.rows) xs.push_back(r.*field);
    return xs;
  };
  rep.sup_l2_sq = estimate_mean(column(&EnergyRow::sup_l2_sq));
  rep.grad_lp = estimate_mean(column(&EnergyRow::grad_lp));
  rep.stab_lq = estimate_mean(column(&EnergyRow::stab_lq));
  rep.interp_lr0 = estimate_mean(column(&EnergyRow::interp_lr0));
  rep.lhs = estimate_mean(column(&EnergyRow::lhs));
  rep.lhs_beta = estimate_mean(column(&EnergyRow::lhs_beta));
  rep.v0_l2_sq = estimate_mean(column(&EnergyRow::v0_l2_sq)).mean;
  rep.forcing_norm_sq = system.forcing().space_time_norm_sq(final_time(trajectories.front()));
  return rep;
}

EnergyReport ensemble_moments(const GalerkinSystem& system, const Eigen::VectorXd& initial,
                              const SdeStepConfig& cfg, int steps, std::uint64_t seed_base, int n_traj,
                              double beta) {
  if (n_traj < 2) throw std::invalid_argument("ensemble moments need n_traj >= 2");
  const auto trajs = run_members(system, initial, cfg, steps, seed_base, n_traj);
  return summarize_energy(system, trajs, beta);
}

ItoCheck energy_identity_residual(const Trajectory& traj) {
  const int steps = traj.steps();
  if (steps < 0 || static_cast<int>(traj.dissipation.size()) != steps ||
      static_cast<int>(traj.martingale.size()) != steps || static_cast<int>(traj.quadratic_variation.size()) != steps) {
    throw std::invalid_argument("trajectory is missing its step history");
  }
  ItoCheck check;
  check.initial = 0.5 * traj.coeffs.front().squaredNorm();
  double diss = 0.0, stab = 0.0, force = 0.0, mart = 0.0, qv = 0.0;
  for (int n = 0; n <= steps; ++n) {
    if (n > 0) {
      diss += traj.dissipation[n - 1];
      stab += traj.stabilization[n - 1];
      force += traj.forcing_work[n - 1];
      mart += traj.martingale[n - 1];
      qv += traj.quadratic_variation[n - 1];
    }
    const double lhs = 0.5 * traj.coeffs[n].squaredNorm();
    const double rhs = check.initial - diss - stab + force + mart + 0.5 * qv;
    check.lhs.push_back(lhs);
    check.rhs.push_back(rhs);
    check.residual.push_back(std::abs(lhs - rhs));
    check.max_residual = std::max(check.max_residual, check.residual.back());
  }
  check.dissipation = diss;
  check.stabilization = stab;
  check.forcing_work = force;
  check.martingale = mart;
  check.quadratic_variation = qv;
  check.final_residual = check.residual.back();
  return check;
}

double fit_order(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("order fit needs >= 2 matching points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  return sxy / sxx;
}

ItoOrderStudy ito_order_study(const GalerkinSystem& system, const Eigen::VectorXd& initial, SdeStepConfig cfg,
                              double T, std::span<const double> dt_grid, int n_paths, std::uint64_t seed_base) {
  if (dt_grid.empty()) throw std::invalid_argument("dt grid is empty");
  if (n_paths < 1) throw std::invalid_argument("path count must be >= 1");
  const double dt_min = *std::min_element(dt_grid.begin(), dt_grid.end());
  if (!(dt_min > 0.0)) throw std::invalid_argument("dt grid entries must be > 0");
  ItoOrderStudy study;
  for (double dt : dt_grid) {
    const long ratio = std::lround(dt / dt_min);
    if (std::abs(ratio * dt_min - dt) > 1e-9 * dt) {
      throw std::invalid_argument("dt grid entries must be integer multiples of the smallest entry");
    }
    const long steps = std::lround(T / dt);
    cfg.dt = dt;
    const auto trajs = run_members(system, initial, cfg, static_cast<int>(steps), seed_base, n_paths,
                                   static_cast<int>(ratio));
    std::vector<double> sq;
    for (const auto& t : trajs) {
      const double r = energy_identity_residual(t).max_residual;
      sq.push_back(r * r);
    }
    study.dts.push_back(dt);
    study.rms_residual.push_back(std::sqrt(neumaier_sum(sq) / static_cast<double>(sq.size())));
  }
  study.order = study.dts.size() >= 2 ? fit_order(study.dts, study.rms_residual) : 0.0;
  return study;
}

double single_mode_decay_rate(const GalerkinSystem& system, int k, const SdeStepConfig& cfg, double T) {
  const int N = system.space().size();
  if (k < 0 || k >= N) throw std::out_of_range("mode index outside the Galerkin space");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("decay study needs dt > 0");
  const long steps = std::lround(T / cfg.dt);
  if (steps < 1) throw std::invalid_argument("decay study needs at least one step");
  VelocityState state{Eigen::VectorXd::Unit(N, k), 0.0};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(system.noise().K);
  std::vector<double> ts{0.0}, logs{0.0};
  for (long n = 0; n < steps; ++n) {
    state = system.step(state, cfg, zero).state;
    const double c = std::abs(state.coeffs(k));
    if (!(c > 0.0)) break;
    ts.push_back(state.time);
    logs.push_back(std::log(c));
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += logs[i];
  }
  mt /= n;
  ml /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - mt) * (logs[i] - ml);
    sxx += (ts[i] - mt) * (ts[i] - mt);
  }
  return sxy / sxx;
}

namespace {

GalerkinSystem system_for(const StudySetup& setup, double alpha) {
  ConstitutiveParams params = setup.params;
  params.alpha = alpha;
  return GalerkinSystem(params, setup.space, setup.noise, setup.forcing);
}

}  // namespace

AlphaStudy alpha_independence_study(const StudySetup& setup, std::span<const double> alphas) {
  AlphaStudy study;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double alpha : alphas) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha grid entries must be >= 0");
    const GalerkinSystem sys = system_for(setup, alpha);
    const EnergyReport rep =
        ensemble_moments(sys, setup.initial, setup.cfg, setup.steps, setup.seed, setup.n_traj, setup.beta);
    AlphaRow row{alpha, rep.bound_ratio(), rep.lhs};
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    study.rows.push_back(row);
  }
  study.spread = study.rows.empty() ? 0.0 : hi / lo;
  return study;
}

StabilizationStudy stabilization_convergence(const StudySetup& setup, std::span<const double> m_grid) {
  StabilizationStudy study;
  std::vector<std::vector<Trajectory>> runs;
  for (double m : m_grid) {
    if (!(m > 0.0)) throw std::invalid_argument("m grid entries must be > 0");
    const GalerkinSystem sys = system_for(setup, 1.0 / m);
    runs.push_back(run_members(sys, setup.initial, setup.cfg, setup.steps, setup.seed, setup.n_traj));
  }
  for (std::size_t g = 1; g < runs.size(); ++g) {
    std::vector<double> diffs;
    for (std::size_t i = 0; i < runs[g].size(); ++i) {
      const Trajectory& a = runs[g - 1][i];
      const Trajectory& b = runs[g][i];
      // The basis is L2-orthonormal, so ||v^a - v^b||^2 is the coefficient distance.
      diffs.push_back(time_integral(a, [&](int n) { return (a.coeffs[n] - b.coeffs[n]).squaredNorm(); }));
    }
    study.rows.push_back({m_grid[g - 1], m_grid[g], estimate_mean(diffs)});
  }
  study.strictly_decreasing = !study.rows.empty();
  for (std::size_t r = 1; r < study.rows.size(); ++r) {
    if (!(study.rows[r].difference.mean < study.rows[r - 1].difference.mean)) study.strictly_decreasing = false;
  }
  return study;
}

double interpolation_diagnostic(const GalerkinSystem& system, const Trajectory& traj) {
  const double p = system.params().p;
  const int d = system.space().dim();
  const EnergyRow row = energy_row(system, traj, 2.0);
  return row.interp_lr0 / (std::pow(row.sup_l2_sq, p / d) * row.grad_lp + 1.0);
}

std::vector<double> weak_solution_residual(const GalerkinSystem& system, const Trajectory& traj,
                                           const WaveMode& test_mode) {
  if (traj.coeffs.size() != traj.dbeta.size() + 1) throw std::invalid_argument("trajectory history is misaligned");
  const auto w = tabulate_mode(system.space(), test_mode);
  const bool implicit = traj.cfg.scheme == Scheme::kSemiImplicit;
  const bool noisy = system.noise().enabled();
  const int steps = traj.steps();

  std::vector<TestPairings> pairs;
  pairs.reserve(steps + 1);
  for (int n = 0; n <= steps; ++n) pairs.push_back(pair_with_mode(system, traj.coeffs[n], w, noisy));

  std::vector<double> out{0.0};
  std::vector<double> increments;
  for (int m = 0; m < steps; ++m) {
    const double dt = traj.times[m + 1] - traj.times[m];
    const TestPairings& left = pairs[m];
    const TestPairings& mono = implicit ? pairs[m + 1] : pairs[m];
    double inc = dt * (-mono.stress - mono.stabilizer + left.convection + forcing_pairing(system, traj.times[m], w));
    for (std::size_t l = 0; l < left.noise.size(); ++l) inc += left.noise[l] * traj.dbeta[m](static_cast<Eigen::Index>(l));
    increments.push_back(inc);
    const double res = pairs[m + 1].velocity - pairs[0].velocity - neumaier_sum(increments);
    out.push_back(std::abs(res));
  }
  return out;
}

}  // namespace powerlaw
