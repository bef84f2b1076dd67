#include "powerlaw/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "powerlaw/analysis.hpp"
#include "powerlaw/constitutive.hpp"
#include "powerlaw/galerkin_system.hpp"
#include "powerlaw/noise.hpp"
#include "powerlaw/pressure.hpp"
#include "powerlaw/spectral.hpp"
#include "powerlaw/torus_basis.hpp"
#include "powerlaw/truncation.hpp"

namespace powerlaw {

namespace {

using Rng = std::mt19937_64;

void add(SuiteReport& rep, const std::string& name, double observed, double tolerance) {
  rep.checks.push_back({name, tolerance, observed, std::isfinite(observed) && observed <= tolerance});
}

// A check whose statistic must reach a lower bound; observed is the shortfall.
void add_at_least(SuiteReport& rep, const std::string& name, double value, double bound) {
  const double shortfall = std::isfinite(value) ? std::max(0.0, bound - value) : std::numeric_limits<double>::infinity();
  rep.checks.push_back({name, 0.0, shortfall, shortfall <= 0.0});
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

SmallVector random_vector(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> expo(-3.0, 2.0);
  const double scale = std::pow(10.0, expo(rng));
  SmallVector v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * normal(rng);
  return v;
}

SuiteReport constitutive_suite(const VerifyOptions& opt) {
  SuiteReport rep{"constitutive", {}};
  Rng rng(opt.seed);
  double worst_gap = 0.0, worst_p2 = 0.0, worst_potential = 0.0, worst_tangent = 0.0;
  double violations = 0.0;
  for (int d : {2, 3}) {
    for (double p : {1.2, 1.6, 2.0, 2.5, 3.0}) {
      const auto params = ConstitutiveParams::make(d, p, 1.0, 0.0);
      for (int i = 0; i < 2000; ++i) {
        const SmallMatrix e1 = random_symmetric(rng, d);
        const SmallMatrix e2 = random_symmetric(rng, d);
        const double gap = monotonicity_gap(params, e1, e2);
        worst_gap = std::max(worst_gap, -gap);
        if (p == 2.0) {
          const double exact = params.nu0 * (e1 - e2).squaredNorm();
          worst_p2 = std::max(worst_p2, std::abs(gap - exact) / exact);
        }
        if (!growth_bounds_check(params, e1).ok) violations += 1.0;
      }
      for (int i = 0; i < 50; ++i) {
        const SmallMatrix e = random_symmetric(rng, d);
        const SmallMatrix dir = random_symmetric(rng, d).normalized();
        const double h = 1e-6 * std::max(1.0, frobenius_norm(e));
        const double fd = (stress_potential(params, e + h * dir) - stress_potential(params, e - h * dir)) / (2.0 * h);
        const double exact = (eval_stress(params, e).array() * dir.array()).sum();
        worst_potential = std::max(worst_potential, std::abs(fd - exact) / std::max(1e-8, std::abs(exact) + 1e-3));
        const SmallMatrix fd_stress = (eval_stress(params, e + h * dir) - eval_stress(params, e - h * dir)) / (2.0 * h);
        const TangentMatrix T = stress_tangent(params, e);
        Eigen::VectorXd flat(d * d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) flat(a * d + b) = dir(a, b);
        const Eigen::VectorXd applied = T * flat;
        double err = 0.0, scale = 1e-3;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            err = std::max(err, std::abs(applied(a * d + b) - fd_stress(a, b)));
            scale = std::max(scale, std::abs(fd_stress(a, b)));
          }
        worst_tangent = std::max(worst_tangent, err / scale);
      }
    }
  }
  add(rep, "monotonicity_gap_nonnegative", worst_gap, 1e-12);
  add(rep, "p2_gap_equals_nu0_norm_sq", worst_p2, 1e-10);
  add(rep, "growth_and_coercivity_violations", violations, 0.0);
  add(rep, "potential_gradient_is_stress", worst_potential, 1e-5);
  add(rep, "tangent_matches_finite_difference", worst_tangent, 1e-5);
  return rep;
}

SuiteReport basis_suite(const VerifyOptions& opt) {
  SuiteReport rep{"basis", {}};
  const GalerkinSpace space = build_space(2, 64, minimal_grid(2, 64));
  const Eigen::MatrixXd gram = space.cell_volume() * space.values().transpose() * space.values();
  add(rep, "gram_identity", (gram - Eigen::MatrixXd::Identity(space.size(), space.size())).cwiseAbs().maxCoeff(),
      1e-10);
  double div = 0.0, eig = 0.0;
  for (int k = 0; k < space.size(); ++k) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(space.size(), k);
    for (double x : space.divergence(e).values) div = std::max(div, std::abs(x));
    const GridField w = space.synthesize(e);
    for (int i = 0; i < 2; ++i) {
      ScalarField comp(2, space.grid());
      for (std::size_t pt = 0; pt < space.points(); ++pt) comp.values[pt] = w.at(pt)[i];
      const ScalarField lap = spectral::laplacian(comp);
      for (std::size_t pt = 0; pt < space.points(); ++pt)
        eig = std::max(eig, std::abs(-lap.values[pt] - space.eigenvalue(k) * comp.values[pt]));
    }
  }
  add(rep, "divergence_free", div, 1e-10);
  add(rep, "stokes_eigenfunction", eig, 1e-9);
  Rng rng(opt.seed);
  std::normal_distribution<double> normal;
  double roundtrip = 0.0;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd c(space.size());
    for (auto& x : c) x = normal(rng);
    roundtrip = std::max(roundtrip, (space.analyze(space.synthesize(c)) - c).cwiseAbs().maxCoeff());
  }
  add(rep, "analyze_synthesize_roundtrip", roundtrip, 1e-12);
  const auto modes = enumerate_modes(2, 2);
  add(rep, "mode_count_norm_sq_le_2", std::abs(static_cast<double>(modes.size()) - 8.0), 0.0);
  return rep;
}

SuiteReport noise_suite(const VerifyOptions& opt) {
  SuiteReport rep{"noise", {}};
  Rng rng(opt.seed);
  for (NoiseFamily fam : {NoiseFamily::kAdditive, NoiseFamily::kLinear, NoiseFamily::kSmoothNorm}) {
    for (int d : {2, 3}) {
      const NoiseModel model = NoiseModel::make(fam, d, 16, 1.0);
      const double L = model.growth_constant();
      const double c = model.decay_constant();
      double worst_sum = 0.0, worst_grad = 0.0, worst_decay = 0.0;
      for (int i = 0; i < 2000; ++i) {
        const SmallVector xi = random_vector(rng, d);
        double sum = 0.0, grad = 0.0, decay = 0.0;
        for (int k = 1; k <= model.K; ++k) {
          sum += eval_g(model, k, xi).norm();
          grad += eval_g_jacobian(model, k, xi).squaredNorm();
          decay = std::max(decay, k * k * eval_g(model, k, xi).squaredNorm());
        }
        worst_sum = std::max(worst_sum, sum / (L * (1.0 + xi.norm())));
        worst_grad = std::max(worst_grad, grad / L);
        worst_decay = std::max(worst_decay, decay / (c * (1.0 + xi.squaredNorm())));
      }
      const std::string tag = to_string(fam) + "_d" + std::to_string(d);
      add(rep, tag + "_growth_ratio", worst_sum, 1.0 + 1e-12);
      add(rep, tag + "_gradient_ratio", worst_grad, 1.0);
      add(rep, tag + "_decay_ratio", worst_decay, 1.0 + 1e-12);
    }
  }
  // |v| = v0 everywhere, linear family: sum_k 4^{-k} v0^2 (2pi)^2 -> v0^2 (2pi)^2 / 3.
  const double v0 = 1.7;
  const int M = 32;
  GridField field(2, M);
  for (std::size_t pt = 0; pt < field.points(); ++pt) {
    const auto x = grid_point(2, M, pt);
    field.at(pt)[0] = v0 * std::cos(x[0] + 2.0 * x[1]);
    field.at(pt)[1] = v0 * std::sin(x[0] + 2.0 * x[1]);
  }
  const NoiseModel lin = NoiseModel::make(NoiseFamily::kLinear, 2, 16, 1.0);
  const double hs = hilbert_schmidt_norm_sq(apply_phi(lin, field));
  const double exact = v0 * v0 * 4.0 * std::numbers::pi * std::numbers::pi / 3.0;
  add(rep, "hs_norm_geometric_series", std::abs(hs - exact) / exact, 1e-6);
  const std::vector<double> ones(10, 1.0);
  add(rep, "u0_norm_partial_sum", std::abs(u0_norm(ones) - 1.2449), 1e-4);

  WienerPath path{opt.seed, 0.01, 2, 1};
  const int n = 20000;
  double s1 = 0.0, s2 = 0.0, cross = 0.0, t2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = path.increment(i, 1);
    const double b = path.increment(i, 2);
    s1 += a;
    s2 += a * a;
    cross += a * b;
    t2 += b * b;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  add(rep, "increment_mean_sigmas", std::abs(mean) / std::sqrt(path.dt / n), 4.0);
  add(rep, "increment_variance_rel", std::abs(var - path.dt) / path.dt, 0.05);
  add(rep, "increment_mode_correlation", std::abs(cross / std::sqrt(s2 * t2)), 0.03);
  add(rep, "increment_repeatable", std::abs(path.increment(17, 1) - path.increment(17, 1)), 0.0);
  return rep;
}

// Random Galerkin fields with |u| spread log-uniformly up to 2^8, together
// with shear flows u = a(x2) e1 for which |grad |u|| = |grad u|.
std::vector<Eigen::VectorXd> truncation_fields(const GalerkinSpace& space, std::uint64_t seed, int count) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> fields;
  for (int f = 0; f < count; ++f) {
    Eigen::VectorXd c(space.size());
    const bool shear = f % 2 == 1;
    for (int k = 0; k < space.size(); ++k) {
      const auto& xi = space.mode(k).xi;
      c(k) = (!shear || xi[0] == 0) ? normal(rng) : 0.0;
    }
    const GridField u = space.synthesize(c);
    double peak = 0.0;
    for (std::size_t pt = 0; pt < space.points(); ++pt) peak = std::max(peak, std::hypot(u.at(pt)[0], u.at(pt)[1]));
    const double target = std::ldexp(1.0, 1 + (7 * f) / std::max(1, count - 1));
    fields.push_back(c * (target / peak));
  }
  return fields;
}

SuiteReport truncation_suite(const VerifyOptions& opt) {
  SuiteReport rep{"truncation", {}};
  double plateau = 0.0, support = 0.0, monotone = 0.0, hplateau = 0.0;
  for (int L = 0; L <= 10; ++L) {
    const auto fam = TruncationFamily::make(L);
    const auto next = TruncationFamily::make(L + 1);
    for (int i = 0; i <= 200; ++i) {
      const double s = 2.0 * i / 200.0;
      plateau = std::max(plateau, std::abs(eval_Psi_L(fam, s) - L));
      hplateau = std::max(hplateau, std::abs(eval_h_L(fam, s) - 0.5 * L * s * s));
      const double t = std::ldexp(1.0, L + 1) * (1.0 + i / 50.0);
      support = std::max(support, std::abs(eval_Psi_L(fam, t)));
      const double u = std::ldexp(1.0, L + 2) * i / 200.0;
      monotone = std::max(monotone, eval_Psi_L(fam, u) - eval_Psi_L(next, u));
    }
  }
  add(rep, "Psi_L_plateau", plateau, 0.0);
  add(rep, "Psi_L_support", support, 0.0);
  add(rep, "Psi_L_monotone_in_L", monotone, 0.0);
  add(rep, "h_L_plateau", hplateau, 1e-12);
  double dmax = 0.0;
  for (int i = 0; i <= 100000; ++i) dmax = std::max(dmax, -eval_dpsi(1.0 + i / 100000.0));
  add(rep, "max_minus_dpsi_is_15_8", std::abs(dmax - 15.0 / 8.0), 1e-9);
  add(rep, "psi_at_1_5", std::abs(eval_psi(1.5) - 0.5), 1e-15);

  const GalerkinSpace space = build_space(2, 40, 3 * 6 + 1);
  const auto fields = truncation_fields(space, opt.seed, 24);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int L = 1; L <= 10; ++L) {
    const auto fam = TruncationFamily::make(L);
    double r = 0.0;
    for (const auto& c : fields) r = std::max(r, gradient_bound_ratio(fam, space, c));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  add(rep, "gradient_ratio_variation_over_L", (hi - lo) / hi, 0.05);
  add(rep, "gradient_ratio_below_chain_bound", hi - max_s_dpsi(), 1e-12);
  return rep;
}

SuiteReport pressure_suite(const VerifyOptions& opt) {
  SuiteReport rep{"pressure", {}};
  const GalerkinSpace space = build_space(2, 8, 16);
  const int M = space.grid();
  MatrixField H(2, M), skew(2, M), constant(2, M);
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const auto x = grid_point(2, M, pt);
    H.at(pt)[0] = std::cos(x[0]);
    skew.at(pt)[1] = 0.7 * std::cos(x[0]);
    skew.at(pt)[2] = -0.7 * std::cos(x[0]);
    for (int c = 0; c < 4; ++c) constant.at(pt)[c] = 1.0 + c;
  }
  const ScalarField pi = solve_pi_H(space, H);
  double err = 0.0;
  for (std::size_t pt = 0; pt < space.points(); ++pt)
    err = std::max(err, std::abs(pi.values[pt] + std::cos(grid_point(2, M, pt)[0])));
  add(rep, "cos_x1_example", err, 1e-10);
  double skew_max = 0.0, const_max = 0.0;
  for (double x : solve_pi_H(space, skew).values) skew_max = std::max(skew_max, std::abs(x));
  for (double x : solve_pi_H(space, constant).values) const_max = std::max(const_max, std::abs(x));
  add(rep, "antisymmetric_H_gives_zero", skew_max, 1e-12);
  add(rep, "constant_H_gives_zero", const_max, 1e-12);

  // int pi Laplace(phi) + int H : grad^2 phi = 0 for resolved scalar test modes.
  Rng rng(opt.seed);
  std::normal_distribution<double> normal;
  MatrixField R(2, M);
  for (double& x : R.values) x = normal(rng);
  const ScalarField piR = solve_pi_H(space, R);
  double weak = 0.0;
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      ScalarField phi(2, M);
      MatrixField hess(2, M);
      for (std::size_t pt = 0; pt < space.points(); ++pt) {
        const auto x = grid_point(2, M, pt);
        const double arg = a * x[0] + b * x[1];
        phi.values[pt] = std::cos(arg);
        const double k[2] = {double(a), double(b)};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) hess.at(pt)[i * 2 + j] = -k[i] * k[j] * std::cos(arg);
      }
      weak = std::max(weak, std::abs(inner(piR, spectral::laplacian(phi)) + inner(R, hess)));
    }
  }
  add(rep, "weak_identity", weak, 1e-10);
  add(rep, "mean_zero", std::abs(spatial_mean(piR)), 1e-12);

  // One step of Phi e1 = sin(x1) e1 with dbeta = 1: pi_Phi = -Delta^{-1} d1 sin(x1) = cos(x1).
  GridField flux(2, M);
  for (std::size_t pt = 0; pt < space.points(); ++pt) flux.at(pt)[0] = std::sin(grid_point(2, M, pt)[0]);
  const ScalarField piPhi = spectral::pressure_from_flux(flux);
  double phi_err = 0.0;
  for (std::size_t pt = 0; pt < space.points(); ++pt)
    phi_err = std::max(phi_err, std::abs(piPhi.values[pt] - std::cos(grid_point(2, M, pt)[0])));
  add(rep, "pi_Phi_one_step_example", phi_err, 1e-10);
  return rep;
}

SuiteReport ito_suite(const VerifyOptions& opt) {
  SuiteReport rep{"ito", {}};
  const GalerkinSpace space = build_space(2, 8, dealiased_grid(2, 8));
  const auto params = ConstitutiveParams::make(2, 1.8, 1.0, 0.1);
  const GalerkinSystem sys(params, space, NoiseModel::make(NoiseFamily::kLinear, 2, 4, 0.2), Forcing::zero());
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(space.size());
  v0(0) = 1.0;
  v0(3) = -0.5;
  SdeStepConfig cfg;
  const auto study = ito_order_study(sys, v0, cfg, 0.5, opt.dt_grid, 256, opt.seed);
  add_at_least(rep, "ito_residual_order", study.order, 0.5);

  const auto p2 = ConstitutiveParams::make(2, 2.0, 0.7, 0.0);
  const GalerkinSystem det(p2, space, NoiseModel::make(NoiseFamily::kLinear, 2, 0, 0.0), Forcing::zero());
  SdeStepConfig fine;
  fine.dt = 1e-3;
  const int k = space.size() - 1;
  const double rate = single_mode_decay_rate(det, k, fine, 1.0);
  const double exact = -0.5 * p2.nu0 * space.eigenvalue(k);
  add(rep, "single_mode_decay_rate_rel", std::abs(rate - exact) / std::abs(exact), 0.01);

  Trajectory zero = run_trajectory(det, Eigen::VectorXd::Zero(space.size()), fine, 50, WienerPath{opt.seed});
  add(rep, "zero_data_residual", energy_identity_residual(zero).max_residual, 0.0);
  return rep;
}

SuiteReport energy_suite(const VerifyOptions& opt) {
  SuiteReport rep{"energy", {}};
  const GalerkinSpace space = build_space(2, 12, dealiased_grid(2, 12));
  const auto params = ConstitutiveParams::make(2, 1.7, 1.0, 0.1);
  Rng rng(opt.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v0(space.size());
  for (auto& x : v0) x = normal(rng);

  const GalerkinSystem quiet(params, space, NoiseModel::make(NoiseFamily::kLinear, 2, 0, 0.0), Forcing::zero());
  SdeStepConfig cfg;
  cfg.dt = 0.05;
  const Trajectory t = run_trajectory(quiet, v0, cfg, 40, WienerPath{opt.seed});
  double increase = 0.0;
  for (int n = 1; n <= t.steps(); ++n) increase = std::max(increase, t.integrals[n].l2_sq - t.integrals[n - 1].l2_sq);
  add(rep, "noise_free_energy_nonincreasing", increase, 1e-12 * t.integrals[0].l2_sq);
  const EnergyRow row = energy_row(quiet, t, moment_exponent(2, params.p));
  add(rep, "noise_free_sup_is_initial", std::abs(row.sup_l2_sq - v0.squaredNorm()), 1e-12 * v0.squaredNorm());

  const GalerkinSystem noisy(params, space, NoiseModel::make(NoiseFamily::kLinear, 2, 4, 0.5), Forcing::zero());
  cfg.dt = 0.01;
  const EnergyReport a = ensemble_moments(noisy, v0, cfg, 20, opt.seed, 16, 0.0);
  const EnergyReport b = ensemble_moments(noisy, v0, cfg, 20, opt.seed + 1, 16, 0.0);
  const double se = std::hypot(a.lhs.std_error, b.lhs.std_error);
  add(rep, "moment_seed_stability_sigmas", std::abs(a.lhs.mean - b.lhs.mean) / se, 3.0);
  add(rep, "beta_moment_finite", std::isfinite(a.lhs_beta.mean) ? 0.0 : 1.0, 0.0);
  add(rep, "beta_d3_p1_6", std::abs(moment_exponent(3, 1.6) - 10.0 / 3.0), 1e-15);
  add(rep, "r0_d2_p2", std::abs(interpolation_exponent(2, 2.0) - 4.0), 0.0);
  return rep;
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double SuiteReport::max_deviation() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.observed);
  return m;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name}, {"tolerance", c.tolerance}, {"observed", c.observed}, {"passed", c.passed}});
  }
  return {{"suite", suite}, {"passed", passed()}, {"max_observed_deviation", max_deviation()}, {"checks", checks_json}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"constitutive", "basis", "noise", "truncation",
                                                 "pressure",     "ito",   "energy"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& options) {
  if (name == "constitutive") return constitutive_suite(options);
  if (name == "basis") return basis_suite(options);
  if (name == "noise") return noise_suite(options);
  if (name == "truncation") return truncation_suite(options);
  if (name == "pressure") return pressure_suite(options);
  if (name == "ito") return ito_suite(options);
  if (name == "energy") return energy_suite(options);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace powerlaw
