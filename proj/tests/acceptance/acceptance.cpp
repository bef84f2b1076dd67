// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "powerlaw/analysis.hpp"
#include "powerlaw/config.hpp"
#include "powerlaw/constitutive.hpp"
#include "powerlaw/galerkin_system.hpp"
#include "powerlaw/noise.hpp"
#include "powerlaw/output.hpp"
#include "powerlaw/pressure.hpp"
#include "powerlaw/spectral.hpp"
#include "powerlaw/torus_basis.hpp"
#include "powerlaw/truncation.hpp"

using namespace powerlaw;
namespace fs = std::filesystem;

namespace {

using Rng = std::mt19937_64;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

SmallMatrix random_symmetric(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> expo(-3.0, 2.0);
  const double scale = std::pow(10.0, expo(rng));
  SmallMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng);
  return scale * 0.5 * (a + a.transpose());
}

Eigen::VectorXd random_coeffs(Rng& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(n);
  for (auto& x : c) x = scale * normal(rng);
  return c;
}

// Coefficients of a fixed initial velocity on the four lowest modes; the same
// physical field for every N >= 4.
Eigen::VectorXd fixed_initial(int n) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  const double v[4] = {1.0, -0.5, 0.25, 0.5};
  for (int k = 0; k < std::min(n, 4); ++k) c(k) = v[k];
  return c;
}

// ---------------------------------------------------------------------------

Outcome constitutive_monotonicity() {
  Rng rng(101);
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_p2 = 0.0;
  for (int d : {2, 3}) {
    for (double p : {1.2, 1.6, 2.0, 2.5, 3.0}) {
      const auto params = ConstitutiveParams::make(d, p, 1.3, 0.0);
      for (int i = 0; i < 100000; ++i) {
        const SmallMatrix e1 = random_symmetric(rng, d);
        const SmallMatrix e2 = random_symmetric(rng, d);
        const double gap = monotonicity_gap(params, e1, e2);
        worst_gap = std::min(worst_gap, gap);
        if (p == 2.0) {
          const double exact = 1.3 * (e1 - e2).squaredNorm();
          worst_p2 = std::max(worst_p2, std::abs(gap - exact) / exact);
        }
      }
    }
  }
  return {worst_gap >= -1e-12 && worst_p2 <= 1e-10,
          "min gap " + fmt(worst_gap) + " (>= -1e-12), p=2 rel dev " + fmt(worst_p2) + " (<= 1e-10)"};
}

// Mode samples A pol cos/sin(xi.x) computed here from the mode description.
GridField analytic_mode(const WaveMode& m, int M) {
  const double A = std::sqrt(2.0) / (2.0 * std::numbers::pi);
  GridField f(2, M);
  for (std::size_t pt = 0; pt < f.points(); ++pt) {
    const auto x = grid_point(2, M, pt);
    const double arg = m.xi[0] * x[0] + m.xi[1] * x[1];
    const double s = m.parity == Parity::kCosine ? std::cos(arg) : std::sin(arg);
    f.at(pt)[0] = A * m.pol[0] * s;
    f.at(pt)[1] = A * m.pol[1] * s;
  }
  return f;
}

Outcome basis_exactness() {
  double gram = 0.0, div = 0.0, roundtrip = 0.0, samples = 0.0;
  Rng rng(202);
  for (int n : {1, 8, 16, 32, 64}) {
    for (int M : {minimal_grid(2, n), dealiased_grid(2, n)}) {
      const GalerkinSpace space = build_space(2, n, M);
      std::vector<GridField> w;
      for (const auto& m : space.modes()) w.push_back(analytic_mode(m, M));
      for (int a = 0; a < n; ++a) {
        const GridField mine = space.synthesize(Eigen::VectorXd::Unit(n, a));
        for (std::size_t i = 0; i < mine.values.size(); ++i)
          samples = std::max(samples, std::abs(mine.values[i] - w[a].values[i]));
        for (int b = a; b < n; ++b) gram = std::max(gram, std::abs(inner(w[a], w[b]) - (a == b ? 1.0 : 0.0)));
        for (double v : space.divergence(Eigen::VectorXd::Unit(n, a)).values) div = std::max(div, std::abs(v));
      }
      for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd c = random_coeffs(rng, n);
        roundtrip = std::max(roundtrip, (space.analyze(space.synthesize(c)) - c).cwiseAbs().maxCoeff());
      }
    }
  }
  return {gram <= 1e-10 && div <= 1e-10 && roundtrip <= 1e-12 && samples <= 1e-12,
          "gram " + fmt(gram) + " (<= 1e-10), div " + fmt(div) + " (<= 1e-10), round-trip " + fmt(roundtrip) +
              " (<= 1e-12), samples vs analytic " + fmt(samples)};
}

Outcome convection_skew_symmetry() {
  const GalerkinSpace space = build_space(2, 16, dealiased_grid(2, 16));
  Rng rng(303);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = random_coeffs(rng, 16, std::pow(10.0, expo(rng)));
    const double b = trilinear_convection(space, v, v, v);
    worst = std::max(worst, std::abs(b) / (1.0 + std::pow(v.norm(), 3)));
  }
  return {worst <= 1e-8, "max |b(v,v,v)| / (1 + |v|^3) " + fmt(worst) + " (<= 1e-8)"};
}

Outcome ito_identity() {
  const GalerkinSpace space = build_space(2, 8, dealiased_grid(2, 8));
  const GalerkinSystem sys(ConstitutiveParams::make(2, 1.8, 1.0, 0.1), space,
                           NoiseModel::make(NoiseFamily::kLinear, 2, 4, 0.2), Forcing::zero());
  const std::vector<double> dts{1e-2, 5e-3, 2.5e-3};
  const ItoOrderStudy study = ito_order_study(sys, fixed_initial(8), SdeStepConfig{}, 0.5, dts, 256, 404);

  const auto p2 = ConstitutiveParams::make(2, 2.0, 0.7, 0.0);
  const GalerkinSystem det(p2, space, NoiseModel::make(NoiseFamily::kLinear, 2, 0, 0.0), Forcing::zero());
  SdeStepConfig fine;
  fine.dt = 1e-3;
  double worst = 0.0;
  for (int k : {0, 7}) {
    const double exact = -0.5 * p2.nu0 * space.eigenvalue(k);
    worst = std::max(worst, std::abs(single_mode_decay_rate(det, k, fine, 1.0) - exact) / std::abs(exact));
  }
  std::string res;
  for (double r : study.rms_residual) res += (res.empty() ? "" : "/") + fmt(r);
  return {study.order >= 0.5 && worst <= 0.01,
          "residual " + res + ", order " + fmt(study.order) + " (>= 0.5), decay-rate rel dev " + fmt(worst) +
              " (<= 0.01)"};
}

StudySetup energy_setup(int N) {
  const GalerkinSpace space = build_space(2, N, dealiased_grid(2, N));
  const auto params = ConstitutiveParams::make(2, 1.8, 1.0, 1.0);
  const Eigen::VectorXd f = 0.5 * Eigen::VectorXd::Unit(N, 0);
  StudySetup s{params,
               space,
               NoiseModel::make(NoiseFamily::kLinear, 2, 4, 0.5),
               Forcing::steady(space.synthesize(f)),
               fixed_initial(N),
               SdeStepConfig{0.01, Scheme::kSemiImplicit, 1e-10, 50},
               50,
               505,
               64,
               0.0};
  return s;
}

Outcome energy_uniformity() {
  const std::vector<double> alphas{1.0, 0.1, 0.01};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::string table;
  for (int N : {4, 8, 16}) {
    const AlphaStudy study = alpha_independence_study(energy_setup(N), alphas);
    for (const auto& r : study.rows) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
      table += " " + fmt(r.ratio);
    }
  }
  const double spread = hi / lo;
  return {std::isfinite(spread) && spread <= 2.0, "R over N x alpha:" + table + "; max/min " + fmt(spread) + " (<= 2)"};
}

Outcome higher_moments() {
  const StudySetup s = energy_setup(8);
  const GalerkinSystem sys(s.params, s.space, s.noise, s.forcing);
  const double beta = moment_exponent(2, s.params.p);
  const EnergyReport a = ensemble_moments(sys, s.initial, s.cfg, s.steps, 606, 64, beta);
  const EnergyReport b = ensemble_moments(sys, s.initial, s.cfg, s.steps, 607, 64, beta);
  const double se = std::hypot(a.lhs_beta.std_error, b.lhs_beta.std_error);
  const double sigmas = std::abs(a.lhs_beta.mean - b.lhs_beta.mean) / se;
  const bool finite = std::isfinite(a.lhs_beta.mean) && std::isfinite(b.lhs_beta.mean) && se > 0.0;
  return {finite && sigmas <= 3.0, "beta " + fmt(beta) + ", moments " + fmt(a.lhs_beta.mean) + " / " +
                                       fmt(b.lhs_beta.mean) + ", difference " + fmt(sigmas) + " SE (<= 3)"};
}

// Random fields with peaks 2^1..2^8 plus shear flows u = a(x2) e1.
std::vector<Eigen::VectorXd> truncation_field_set(const GalerkinSpace& space) {
  Rng rng(707);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> fields;
  for (int f = 0; f < 32; ++f) {
    Eigen::VectorXd c(space.size());
    for (int k = 0; k < space.size(); ++k) c(k) = (f % 2 == 0 || space.mode(k).xi[0] == 0) ? normal(rng) : 0.0;
    const GridField u = space.synthesize(c);
    double peak = 0.0;
    for (std::size_t pt = 0; pt < space.points(); ++pt) peak = std::max(peak, std::hypot(u.at(pt)[0], u.at(pt)[1]));
    fields.push_back(c * (std::ldexp(1.0, 1 + (f / 2) % 8) / peak));
  }
  return fields;
}

Outcome truncation_family() {
  double plateau = 0.0, support = 0.0;
  for (int L = 1; L <= 10; ++L) {
    const auto fam = TruncationFamily::make(L);
    for (int i = 0; i <= 1000; ++i) {
      plateau = std::max(plateau, std::abs(eval_Psi_L(fam, 2.0 * i / 1000.0) - L));
      support = std::max(support, std::abs(eval_Psi_L(fam, std::ldexp(1.0, L + 1) * (1.0 + i / 100.0))));
    }
  }
  const GalerkinSpace space = build_space(2, 40, 19);
  const auto fields = truncation_field_set(space);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int L = 1; L <= 10; ++L) {
    double r = 0.0;
    for (const auto& c : fields) r = std::max(r, gradient_bound_ratio(TruncationFamily::make(L), space, c));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double variation = (hi - lo) / hi;
  return {plateau == 0.0 && support == 0.0 && hi > 0.0 && variation < 0.05,
          "plateau dev " + fmt(plateau) + ", support dev " + fmt(support) + ", ratio range [" + fmt(lo) + ", " +
              fmt(hi) + "], variation " + fmt(variation) + " (< 0.05)"};
}

Outcome pressure_decomposition() {
  const GalerkinSpace space = build_space(2, 8, 16);
  const int M = space.grid();
  MatrixField H(2, M);
  for (std::size_t pt = 0; pt < space.points(); ++pt) H.at(pt)[0] = std::cos(grid_point(2, M, pt)[0]);
  double cos_err = 0.0;
  const ScalarField pi = solve_pi_H(space, H);
  for (std::size_t pt = 0; pt < space.points(); ++pt)
    cos_err = std::max(cos_err, std::abs(pi.values[pt] + std::cos(grid_point(2, M, pt)[0])));

  const GalerkinSystem sys(ConstitutiveParams::make(2, 2.0, 1.0, 0.0), space,
                           NoiseModel::make(NoiseFamily::kLinear, 2, 0, 0.0), Forcing::zero());
  Rng rng(808);
  const Eigen::VectorXd v0 = random_coeffs(rng, 8, 2.0);
  // A mode of X_N, a gradient, and a non-solenoidal field whose solenoidal
  // part lies in X_N (wave vectors (1,1) and (1,-1)).
  GridField phi = space.synthesize(Eigen::VectorXd::Unit(8, 3));
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const auto x = grid_point(2, M, pt);
    phi.at(pt)[0] += -std::sin(x[0] + 2.0 * x[1]) + std::cos(x[0] + x[1]);
    phi.at(pt)[1] += -2.0 * std::sin(x[0] + 2.0 * x[1]) + std::sin(x[0] - x[1]);
  }
  std::vector<double> dts{0.02, 0.01, 0.005}, res;
  double harmonic = 0.0, without_pressure = 0.0;
  for (double dt : dts) {
    SdeStepConfig cfg;
    cfg.dt = dt;
    const int steps = static_cast<int>(std::lround(0.2 / dt));
    const Trajectory t = run_trajectory(sys, v0, cfg, steps, WienerPath{});
    PressureDecomposition dec = decompose(sys, t);
    res.push_back(weak_residual(sys, t, dec, phi, steps));
    for (const auto& h : dec.pi_h) {
      for (double v : h.values) harmonic = std::max(harmonic, std::abs(v));
      for (double v : spectral::laplacian(h).values) harmonic = std::max(harmonic, std::abs(v));
    }
    for (auto& p : dec.pi_H) p *= 0.0;
    without_pressure = weak_residual(sys, t, dec, phi, steps);
  }
  const double order = fit_order(dts, res);
  const bool decreasing = res[1] < res[0] && res[2] < res[1];
  return {cos_err <= 1e-10 && decreasing && order >= 0.9 && harmonic == 0.0,
          "cos example " + fmt(cos_err) + " (<= 1e-10), weak residual " + fmt(res[0]) + "/" + fmt(res[1]) + "/" +
              fmt(res[2]) + " order " + fmt(order) + " (>= 0.9; " + fmt(without_pressure) +
              " without pi_H), max |pi_h|, |Lap pi_h| " + fmt(harmonic)};
}

Outcome noise_model() {
  Rng rng(909);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  double worst = 0.0;
  for (NoiseFamily fam : {NoiseFamily::kAdditive, NoiseFamily::kLinear, NoiseFamily::kSmoothNorm}) {
    for (int d : {2, 3}) {
      const NoiseModel model = NoiseModel::make(fam, d, 16, 1.0);
      for (int i = 0; i < 10000; ++i) {
        SmallVector xi(d);
        const double scale = std::pow(10.0, expo(rng));
        for (int a = 0; a < d; ++a) xi(a) = scale * normal(rng);
        double sum = 0.0, grad = 0.0, decay = 0.0;
        for (int k = 1; k <= model.K; ++k) {
          sum += eval_g(model, k, xi).norm();
          grad += eval_g_jacobian(model, k, xi).squaredNorm();
          decay = std::max(decay, k * k * eval_g(model, k, xi).squaredNorm());
        }
        worst = std::max({worst, sum / (model.growth_constant() * (1.0 + xi.norm())), grad / model.growth_constant(),
                          decay / (model.decay_constant() * (1.0 + xi.squaredNorm()))});
      }
    }
  }
  const double v0 = 1.7;
  GridField field(2, 32);
  for (std::size_t pt = 0; pt < field.points(); ++pt) {
    const auto x = grid_point(2, 32, pt);
    field.at(pt)[0] = v0 * std::cos(3.0 * x[0] - x[1]);
    field.at(pt)[1] = v0 * std::sin(3.0 * x[0] - x[1]);
  }
  const double hs = hilbert_schmidt_norm_sq(apply_phi(NoiseModel::make(NoiseFamily::kLinear, 2, 40, 1.0), field));
  const double exact = v0 * v0 * 4.0 * std::numbers::pi * std::numbers::pi / 3.0;
  const double rel = std::abs(hs - exact) / exact;
  return {worst <= 1.0 + 1e-12 && rel <= 1e-6,
          "max bound ratio " + fmt(worst) + " (<= 1 up to roundoff), HS rel dev " + fmt(rel) + " (<= 1e-6)"};
}

Outcome stabilization_vanishing() {
  StudySetup s = energy_setup(8);
  s.n_traj = 32;
  const std::vector<double> m{1.0, 10.0, 100.0};
  const StabilizationStudy study = stabilization_convergence(s, m);
  std::string diffs;
  for (const auto& r : study.rows) diffs += (diffs.empty() ? "" : " > ") + fmt(r.difference.mean);
  return {study.rows.size() == 2 && study.strictly_decreasing &&
              study.rows[0].difference.mean > study.rows[1].difference.mean,
          "E||v^m - v^m'||^2 for (1,10), (10,100): " + diffs};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "powerlaw_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "run.json") << R"({"d": 2, "p": 1.6, "N": 8, "dt": 0.01, "T_end": 0.2, "K": 4,
      "noise_amplitude": 0.5, "init_mode": "taylor_green", "alpha": 0.1, "seed": 11, "n_traj": 4})";
  }
  bool ok = true;
  std::vector<std::string> compared;
  for (const char* cmd : {"simulate", "ensemble"}) {
    for (const char* run : {"a", "b"}) {
      const std::string line = std::string(POWERLAW_CLI_PATH) + " " + cmd + " --config " + (dir / "run.json").string() +
                               " --out " + (dir / (std::string(cmd) + run)).string() + " > /dev/null 2>&1";
      const int status = std::system(line.c_str());
      ok = ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
  }
  for (const auto& [cmd, file] : std::vector<std::pair<std::string, std::string>>{
           {"simulate", "trajectory.csv"}, {"simulate", "coefficients.json"}, {"simulate", "config.json"},
           {"ensemble", "energy_report.json"}, {"ensemble", "energy.csv"}}) {
    const std::string a = slurp(dir / (cmd + "a") / file), b = slurp(dir / (cmd + "b") / file);
    ok = ok && !a.empty() && a == b;
    compared.push_back(file);
  }
  fs::remove_all(dir);
  std::string list;
  for (const auto& f : compared) list += (list.empty() ? "" : ", ") + f;
  return {ok, "byte-identical across two runs: " + list};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 = no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "constitutive monotonicity", 10.0, constitutive_monotonicity},
      {2, "basis exactness", 5.0, basis_exactness},
      {3, "convection skew-symmetry", 30.0, convection_skew_symmetry},
      {4, "Ito energy identity", 60.0, ito_identity},
      {5, "energy estimate uniform in N and alpha", 600.0, energy_uniformity},
      {6, "higher moments", 600.0, higher_moments},
      {7, "truncation family", 30.0, truncation_family},
      {8, "pressure decomposition", 60.0, pressure_decomposition},
      {9, "noise model", 10.0, noise_model},
      {10, "stabilization vanishing", 300.0, stabilization_vanishing},
      {11, "reproducibility", 0.0, reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool passed = out.passed && in_time;
    failures += passed ? 0 : 1;
    std::string timing = fmt(secs) + " s";
    if (c.limit_s > 0.0) timing += " (< " + fmt(c.limit_s) + " s)";
    std::printf("%s C%d %s: %s; %s\n", passed ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
