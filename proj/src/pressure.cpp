#include "powerlaw/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "powerlaw/spectral.hpp"

namespace powerlaw {

namespace {

void check_history(const Trajectory& trajectory, int n) {
  if (trajectory.coeffs.size() != trajectory.dbeta.size() + 1 ||
      trajectory.times.size() != trajectory.coeffs.size()) {
    throw std::invalid_argument("trajectory history is misaligned with its increments");
  }
  if (n < 0 || n > trajectory.steps()) throw std::out_of_range("state index outside the trajectory");
}

double lp_integral(const ScalarField& f, double s) {
  double sum = 0.0;
  for (double v : f.values) sum += std::pow(std::abs(v), s);
  return sum * f.cell_volume();
}

double frobenius_lp_integral(const MatrixField& H, double s) {
  const int c = H.components();
  double sum = 0.0;
  for (std::size_t pt = 0; pt < H.points(); ++pt) {
    const double* h = H.at(pt);
    double n2 = 0.0;
    for (int i = 0; i < c; ++i) n2 += h[i] * h[i];
    sum += std::pow(n2, 0.5 * s);
  }
  return sum * H.cell_volume();
}

// int H : grad phi + load_mean . int phi + int pi div phi
double pressure_weighted_flux(const HParts& h, const ScalarField& pi, const MatrixField& grad_phi,
                              const ScalarField& div_phi, const std::vector<double>& phi_integral) {
  double value = inner(h.total(), grad_phi) + inner(pi, div_phi);
  for (std::size_t i = 0; i < phi_integral.size(); ++i) value += h.load_mean[i] * phi_integral[i];
  return value;
}

GridField weighted_noise(const GalerkinSystem& system, const Eigen::VectorXd& coeffs, const Eigen::VectorXd& dbeta) {
  const GalerkinSpace& space = system.space();
  GridField out(space.dim(), space.grid());
  if (!system.noise().enabled()) return out;
  const auto phi = apply_phi(system.noise(), space.synthesize(coeffs));
  for (std::size_t l = 0; l < phi.size(); ++l) {
    const double b = dbeta(static_cast<Eigen::Index>(l));
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b * phi[l].values[i];
  }
  return out;
}

}  // namespace

ScalarField solve_pi_H(const GalerkinSpace& space, const MatrixField& H) {
  if (H.d != space.dim() || H.M != space.grid()) throw std::invalid_argument("H does not live on the space's grid");
  return spectral::pressure_from_stress(H);
}

ScalarField pi_Phi_increment(const GalerkinSystem& system, const Eigen::VectorXd& coeffs,
                             const Eigen::VectorXd& dbeta) {
  return spectral::pressure_from_flux(weighted_noise(system, coeffs, dbeta));
}

ScalarField solve_pi_Phi(const GalerkinSystem& system, const Trajectory& trajectory, int steps) {
  check_history(trajectory, steps);
  const GalerkinSpace& space = system.space();
  GridField flux(space.dim(), space.grid());
  for (int m = 0; m < steps; ++m) flux += weighted_noise(system, trajectory.coeffs[m], trajectory.dbeta[m]);
  // The multiplier is linear, so summing fluxes first gives the same field.
  return spectral::pressure_from_flux(flux);
}

HParts assemble_H(const GalerkinSystem& system, const Eigen::VectorXd& coeffs, double t) {
  const GalerkinSpace& space = system.space();
  const ConstitutiveParams& params = system.params();
  const int d = space.dim();
  const GridField v = space.synthesize(coeffs);
  const MatrixField eps = space.symmetric_gradient(coeffs);
  const GridField* f = system.forcing().at(t);

  HParts h{MatrixField(d, space.grid()), MatrixField(d, space.grid()), std::vector<double>(d, 0.0)};
  GridField load(d, space.grid());
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const double* e = eps.at(pt);
    const double* u = v.at(pt);
    double en2 = 0.0, un2 = 0.0;
    for (int i = 0; i < d * d; ++i) en2 += e[i] * e[i];
    for (int i = 0; i < d; ++i) un2 += u[i] * u[i];
    const double a = params.nu0 * std::pow(1.0 + std::sqrt(en2), params.p - 2.0);
    const double sa = (params.alpha > 0.0 && un2 > 0.0) ? params.alpha * std::pow(un2, 0.5 * (params.q - 2.0)) : 0.0;
    double* hs = h.stress.at(pt);
    double* ht = h.transport.at(pt);
    double* g = load.at(pt);
    for (int i = 0; i < d; ++i) {
      g[i] = sa * u[i] - (f ? f->at(pt)[i] : 0.0);
      for (int j = 0; j < d; ++j) {
        hs[i * d + j] = a * e[i * d + j];
        ht[i * d + j] = -u[i] * u[j];
      }
    }
  }
  MatrixField G = spectral::gradient_inverse_laplacian(load);
  G *= -1.0;
  h.transport += G;
  for (int i = 0; i < d; ++i) {
    double sum = 0.0;
    for (std::size_t pt = 0; pt < space.points(); ++pt) sum += load.at(pt)[i];
    h.load_mean[i] = sum / static_cast<double>(space.points());
  }
  return h;
}

ScalarField PressureDecomposition::total(int n) const {
  if (n < 0 || n >= static_cast<int>(times.size())) throw std::out_of_range("state index outside the decomposition");
  ScalarField out = pi_h[n];
  out += pi_Phi[n];
  for (int m = 0; m < n; ++m) {
    const double w = 0.5 * (times[m + 1] - times[m]);
    ScalarField a = pi_H[m];
    a += pi_H[m + 1];
    a *= w;
    out += a;
  }
  return out;
}

PressureDecomposition decompose(const GalerkinSystem& system, const Trajectory& trajectory) {
  check_history(trajectory, 0);
  const GalerkinSpace& space = system.space();
  const int n_states = static_cast<int>(trajectory.coeffs.size());
  PressureDecomposition dec;
  dec.times = trajectory.times;
  GridField flux(space.dim(), space.grid());
  for (int n = 0; n < n_states; ++n) {
    const HParts h = assemble_H(system, trajectory.coeffs[n], trajectory.times[n]);
    dec.pi_1.push_back(solve_pi_H(space, h.stress));
    dec.pi_2.push_back(solve_pi_H(space, h.transport));
    ScalarField total = dec.pi_1.back();
    total += dec.pi_2.back();
    dec.pi_H.push_back(std::move(total));
    dec.pi_h.emplace_back(space.dim(), space.grid());
    dec.pi_Phi.push_back(spectral::pressure_from_flux(flux));
    if (n + 1 < n_states) flux += weighted_noise(system, trajectory.coeffs[n], trajectory.dbeta[n]);
  }
  return dec;
}

double weak_residual(const GalerkinSystem& system, const Trajectory& trajectory,
                     const PressureDecomposition& decomposition, const GridField& test_field, int n) {
  check_history(trajectory, n);
  const GalerkinSpace& space = system.space();
  if (test_field.d != space.dim() || test_field.M != space.grid()) {
    throw std::invalid_argument("test field does not live on the space's grid");
  }
  if (decomposition.times.size() != trajectory.times.size()) {
    throw std::invalid_argument("pressure decomposition does not match the trajectory");
  }
  const int d = space.dim();
  const MatrixField grad_phi = [&] {
    MatrixField g(d, space.grid());
    for (int i = 0; i < d; ++i) {
      ScalarField comp(d, space.grid());
      for (std::size_t pt = 0; pt < space.points(); ++pt) comp.values[pt] = test_field.at(pt)[i];
      const GridField gi = spectral::gradient(comp);
      for (std::size_t pt = 0; pt < space.points(); ++pt)
        for (int j = 0; j < d; ++j) g.at(pt)[i * d + j] = gi.at(pt)[j];
    }
    return g;
  }();
  const ScalarField div_phi = spectral::divergence(test_field);
  std::vector<double> phi_integral(d, 0.0);
  for (std::size_t pt = 0; pt < space.points(); ++pt)
    for (int i = 0; i < d; ++i) phi_integral[i] += test_field.at(pt)[i] * space.cell_volume();

  double residual = inner(space.synthesize(trajectory.coeffs[n]), test_field) -
                    inner(space.synthesize(trajectory.coeffs[0]), test_field);
  double previous = 0.0;
  for (int m = 0; m <= n; ++m) {
    const HParts h = assemble_H(system, trajectory.coeffs[m], trajectory.times[m]);
    const double current = pressure_weighted_flux(h, decomposition.pi_H[m], grad_phi, div_phi, phi_integral);
    if (m > 0) residual += 0.5 * (trajectory.times[m] - trajectory.times[m - 1]) * (previous + current);
    previous = current;
  }
  residual += inner(decomposition.pi_Phi[n], div_phi);
  for (int m = 0; m < n; ++m) {
    residual -= inner(weighted_noise(system, trajectory.coeffs[m], trajectory.dbeta[m]), test_field);
  }
  return std::abs(residual);
}

EstimateReport estimate_check(const GalerkinSystem& system, const std::vector<Trajectory>& trajectories) {
  EstimateReport rep;
  rep.s = system.params().conjugate_exponent();
  rep.chi = std::min(2.0, rep.s);
  rep.n_traj = static_cast<int>(trajectories.size());
  if (trajectories.empty()) return rep;
  const GalerkinSpace& space = system.space();
  for (const Trajectory& traj : trajectories) {
    check_history(traj, 0);
    double int_pi = 0.0, int_H = 0.0, sup_pi_phi = 0.0, sup_hs = 0.0, sup_l2 = 0.0;
    GridField flux(space.dim(), space.grid());
    for (int n = 0; n <= traj.steps(); ++n) {
      const Eigen::VectorXd& C = traj.coeffs[n];
      const GridField v = space.synthesize(C);
      sup_l2 = std::max(sup_l2, inner(v, v));
      if (system.noise().enabled()) {
        const auto phi = apply_phi(system.noise(), v);
        sup_hs = std::max(sup_hs, hilbert_schmidt_norm_sq(phi));
      }
      const ScalarField pi_phi = spectral::pressure_from_flux(flux);
      sup_pi_phi = std::max(sup_pi_phi, inner(pi_phi, pi_phi));
      if (n < traj.steps()) {
        const double dt = traj.times[n + 1] - traj.times[n];
        const MatrixField H = assemble_H(system, C, traj.times[n]).total();
        int_pi += dt * lp_integral(solve_pi_H(space, H), rep.s);
        int_H += dt * frobenius_lp_integral(H, rep.s);
        flux += weighted_noise(system, C, traj.dbeta[n]);
      }
    }
    const double v0_sq = inner(space.synthesize(traj.coeffs[0]), space.synthesize(traj.coeffs[0]));
    rep.lhs_H += int_pi;
    rep.rhs_H += int_H;
    rep.lhs_Phi += sup_pi_phi;
    rep.rhs_Phi += sup_hs;
    rep.rhs_h += 1.0 + sup_l2 + sup_hs + v0_sq + int_H;
  }
  const double n = static_cast<double>(trajectories.size());
  rep.lhs_H /= n;
  rep.rhs_H /= n;
  rep.lhs_Phi /= n;
  rep.rhs_Phi /= n;
  rep.rhs_h /= n;
  auto ratio = [](double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs : 0.0; };
  rep.ratio_H = ratio(rep.lhs_H, rep.rhs_H);
  rep.ratio_Phi = ratio(rep.lhs_Phi, rep.rhs_Phi);
  rep.ratio_h = ratio(rep.lhs_h, rep.rhs_h);
  return rep;
}

}  // namespace powerlaw
