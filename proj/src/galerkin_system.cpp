#include "powerlaw/galerkin_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powerlaw {

namespace {

using Eigen::Index;

// Velocity and velocity gradient samples of a Galerkin state.
struct Samples {
  Eigen::VectorXd v;     // npts * d
  Eigen::VectorXd grad;  // npts * d * d, (pt, i, j) -> d_j v_i
};

Samples sample(const GalerkinSpace& space, const Eigen::VectorXd& coeffs) {
  return {space.values() * coeffs, space.gradients() * coeffs};
}

// Symmetric part of the gradient block of one point, as a SmallMatrix.
SmallMatrix strain_at(const double* g, int d) {
  SmallMatrix eps(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) eps(i, j) = 0.5 * (g[i * d + j] + g[j * d + i]);
  return eps;
}

bool all_finite(const Eigen::VectorXd& x) { return x.allFinite(); }

}  // namespace

Forcing Forcing::steady(GridField field) {
  Forcing f;
  f.mode_ = Mode::kSteady;
  f.fields_.push_back(std::move(field));
  return f;
}

Forcing Forcing::time_series(std::vector<GridField> fields, double dt) {
  if (fields.empty()) throw std::invalid_argument("forcing time series is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("forcing time series needs dt > 0");
  Forcing f;
  f.mode_ = Mode::kTimeSeries;
  f.fields_ = std::move(fields);
  f.dt_ = dt;
  return f;
}

const GridField* Forcing::at(double t) const {
  switch (mode_) {
    case Mode::kZero: return nullptr;
    case Mode::kSteady: return &fields_.front();
    case Mode::kTimeSeries: {
      const auto last = static_cast<long>(fields_.size()) - 1;
      long idx = static_cast<long>(std::floor(t / dt_ + 0.5));
      idx = std::clamp(idx, 0L, last);
      return &fields_[static_cast<std::size_t>(idx)];
    }
  }
  return nullptr;
}

double Forcing::space_time_norm_sq(double T) const {
  switch (mode_) {
    case Mode::kZero: return 0.0;
    case Mode::kSteady: return T * inner(fields_.front(), fields_.front());
    case Mode::kTimeSeries: {
      double sum = 0.0;
      const long steps = static_cast<long>(std::llround(T / dt_));
      for (long n = 0; n < steps; ++n) {
        const GridField* f = at(n * dt_);
        sum += dt_ * inner(*f, *f);
      }
      return sum;
    }
  }
  return 0.0;
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kEulerMaruyama ? "euler_maruyama" : "semi_implicit";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler_maruyama") return Scheme::kEulerMaruyama;
  if (name == "semi_implicit") return Scheme::kSemiImplicit;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected euler_maruyama or semi_implicit)");
}

void SdeStepConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be finite and >= 0");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be > 0");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
}

GalerkinSystem::GalerkinSystem(ConstitutiveParams params, GalerkinSpace space, NoiseModel noise, Forcing forcing)
    : params_(params), space_(std::move(space)), noise_(std::move(noise)), forcing_(std::move(forcing)) {
  if (params_.d != space_.dim() || noise_.d != space_.dim()) {
    throw std::invalid_argument("dimension mismatch between parameters, space and noise model");
  }
  steady_forcing_ = Eigen::VectorXd::Zero(space_.size());
  if (forcing_.mode() == Forcing::Mode::kSteady) steady_forcing_ = space_.analyze(*forcing_.at(0.0));
}

void GalerkinSystem::check(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != space_.size()) throw std::invalid_argument("state length does not match the Galerkin space");
}

Eigen::VectorXd GalerkinSystem::forcing_coeffs(double t) const {
  switch (forcing_.mode()) {
    case Forcing::Mode::kZero: return Eigen::VectorXd::Zero(space_.size());
    case Forcing::Mode::kSteady: return steady_forcing_;
    case Forcing::Mode::kTimeSeries: return space_.analyze(*forcing_.at(t));
  }
  return Eigen::VectorXd::Zero(space_.size());
}

DriftParts GalerkinSystem::drift_parts(const Eigen::VectorXd& coeffs, double t) const {
  check(coeffs);
  const int d = space_.dim();
  const int d2 = d * d;
  const std::size_t npts = space_.points();
  const Samples s = sample(space_, coeffs);

  Eigen::VectorXd stress_flux(static_cast<Index>(npts * d2));
  Eigen::VectorXd conv_flux(static_cast<Index>(npts * d2));
  Eigen::VectorXd stab(static_cast<Index>(npts * d));
  for (std::size_t pt = 0; pt < npts; ++pt) {
    const double* g = s.grad.data() + pt * d2;
    const double* v = s.v.data() + pt * d;
    const SmallMatrix eps = strain_at(g, d);
    const double a = params_.nu0 * std::pow(1.0 + frobenius_norm(eps), params_.p - 2.0);
    double vn2 = 0.0;
    for (int i = 0; i < d; ++i) vn2 += v[i] * v[i];
    const double sa = (params_.alpha > 0.0 && vn2 > 0.0) ? params_.alpha * std::pow(vn2, 0.5 * (params_.q - 2.0)) : 0.0;
    for (int i = 0; i < d; ++i) {
      stab(static_cast<Index>(pt * d + i)) = sa * v[i];
      for (int j = 0; j < d; ++j) {
        stress_flux(static_cast<Index>(pt * d2 + i * d + j)) = a * eps(i, j);
        conv_flux(static_cast<Index>(pt * d2 + i * d + j)) = v[i] * v[j];
      }
    }
  }
  const double cv = space_.cell_volume();
  DriftParts parts;
  parts.stress = -cv * (space_.gradients().transpose() * stress_flux);
  parts.convection = cv * (space_.gradients().transpose() * conv_flux);
  parts.stabilizer = -cv * (space_.values().transpose() * stab);
  parts.forcing = forcing_coeffs(t);
  return parts;
}

Eigen::MatrixXd GalerkinSystem::diffusion(const Eigen::VectorXd& coeffs) const {
  check(coeffs);
  const int d = space_.dim();
  const int K = noise_.K;
  if (K == 0 || !noise_.enabled()) return Eigen::MatrixXd::Zero(space_.size(), K);
  const std::size_t npts = space_.points();
  const Eigen::VectorXd v = space_.values() * coeffs;
  Eigen::MatrixXd gvals(static_cast<Index>(npts * d), K);
  SmallVector xi(d);
  for (std::size_t pt = 0; pt < npts; ++pt) {
    for (int i = 0; i < d; ++i) xi(i) = v(static_cast<Index>(pt * d + i));
    for (int l = 1; l <= K; ++l) {
      const SmallVector g = eval_g(noise_, l, xi);
      for (int i = 0; i < d; ++i) gvals(static_cast<Index>(pt * d + i), l - 1) = g(i);
    }
  }
  return space_.cell_volume() * (space_.values().transpose() * gvals);
}

StateIntegrals GalerkinSystem::integrals(const Eigen::VectorXd& coeffs) const {
  check(coeffs);
  const int d = space_.dim();
  const int d2 = d * d;
  const Samples s = sample(space_, coeffs);
  const double r0 = params_.p * (d + 2.0) / d;
  StateIntegrals out;
  for (std::size_t pt = 0; pt < space_.points(); ++pt) {
    const double* g = s.grad.data() + pt * d2;
    const double* v = s.v.data() + pt * d;
    const SmallMatrix eps = strain_at(g, d);
    const double t = frobenius_norm(eps);
    double gn2 = 0.0, vn2 = 0.0;
    for (int i = 0; i < d2; ++i) gn2 += g[i] * g[i];
    for (int i = 0; i < d; ++i) vn2 += v[i] * v[i];
    const double vn = std::sqrt(vn2);
    out.l2_sq += vn2;
    out.stress_work += params_.nu0 * std::pow(1.0 + t, params_.p - 2.0) * t * t;
    out.grad_lp += std::pow(std::sqrt(gn2), params_.p);
    out.lq += std::pow(vn, params_.q);
    out.lr0 += std::pow(vn, r0);
    out.stress_potential += stress_potential_of_norm(params_, t);
  }
  const double cv = space_.cell_volume();
  out.l2_sq *= cv;
  out.stress_work *= cv;
  out.grad_lp *= cv;
  out.lq *= cv;
  out.lr0 *= cv;
  out.stress_potential *= cv;
  return out;
}

GalerkinSystem::MonotoneEval GalerkinSystem::monotone(const Eigen::VectorXd& coeffs, bool with_hessian) const {
  check(coeffs);
  const int d = space_.dim();
  const int d2 = d * d;
  const int N = space_.size();
  const std::size_t npts = space_.points();
  const Samples s = sample(space_, coeffs);
  const auto& G = space_.gradients();
  const auto& V = space_.values();
  const bool stabilized = params_.alpha > 0.0;

  Eigen::VectorXd stress_flux(static_cast<Index>(npts * d2));
  Eigen::VectorXd stab(static_cast<Index>(npts * d));
  Eigen::MatrixXd weighted_grad;
  Eigen::MatrixXd weighted_val;
  if (with_hessian) {
    weighted_grad.resize(G.rows(), N);
    if (stabilized) weighted_val.resize(V.rows(), N);
  }
  double potential = 0.0;
  SmallVector vv(d);
  for (std::size_t pt = 0; pt < npts; ++pt) {
    const double* g = s.grad.data() + pt * d2;
    const double* v = s.v.data() + pt * d;
    const SmallMatrix eps = strain_at(g, d);
    const double t = frobenius_norm(eps);
    const double a = params_.nu0 * std::pow(1.0 + t, params_.p - 2.0);
    potential += stress_potential_of_norm(params_, t);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) stress_flux(static_cast<Index>(pt * d2 + i * d + j)) = a * eps(i, j);
    for (int i = 0; i < d; ++i) vv(i) = v[i];
    const double vn = vv.norm();
    const double sa = (stabilized && vn > 0.0) ? params_.alpha * std::pow(vn, params_.q - 2.0) : 0.0;
    if (stabilized) potential += params_.alpha * std::pow(vn, params_.q) / params_.q;
    for (int i = 0; i < d; ++i) stab(static_cast<Index>(pt * d + i)) = sa * v[i];
    if (with_hessian) {
      const Index r = static_cast<Index>(pt * d2);
      weighted_grad.middleRows(r, d2).noalias() = stress_tangent(params_, eps) * G.middleRows(r, d2);
      if (stabilized) {
        const Index rv = static_cast<Index>(pt * d);
        weighted_val.middleRows(rv, d).noalias() = stabilizer_tangent(params_, vv) * V.middleRows(rv, d);
      }
    }
  }
  const double cv = space_.cell_volume();
  MonotoneEval out;
  out.potential = cv * potential;
  out.gradient = cv * (G.transpose() * stress_flux + V.transpose() * stab);
  if (with_hessian) {
    out.hessian = cv * (G.transpose() * weighted_grad);
    if (stabilized) out.hessian += cv * (V.transpose() * weighted_val);
    out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  }
  return out;
}

StepResult GalerkinSystem::step(const VelocityState& state, const SdeStepConfig& cfg,
                                const Eigen::VectorXd& dbeta) const {
  cfg.validate();
  check(state.coeffs);
  if (dbeta.size() != noise_.K) throw std::invalid_argument("increment vector length differs from K");
  const double dt = cfg.dt;
  const double t = state.time;
  const Eigen::VectorXd& C = state.coeffs;
  const Eigen::MatrixXd sigma = diffusion(C);
  const Eigen::VectorXd noise_inc = sigma * dbeta;

  StepResult out;
  out.dbeta = dbeta;
  out.martingale = (sigma.transpose() * C).dot(dbeta);
  out.quadratic_variation = dt * sigma.squaredNorm();

  const DriftParts parts = drift_parts(C, t);
  out.forcing_work = dt * C.dot(parts.forcing);

  if (cfg.scheme == Scheme::kEulerMaruyama) {
    out.state.coeffs = C + dt * parts.total() + noise_inc;
    out.dissipation = -dt * C.dot(parts.stress);
    out.stabilization = -dt * C.dot(parts.stabilizer);
  } else {
    // X + dt A(X) = rhs  <=>  X minimizes 1/2 |X - rhs|^2 + dt (int F(eps) + alpha/q int |v|^q).
    const Eigen::VectorXd rhs = C + dt * (parts.convection + parts.forcing) + noise_inc;
    const double tol = cfg.newton_tol * std::max(1.0, rhs.norm());
    Eigen::VectorXd X = rhs;
    const int N = space_.size();
    double residual = 0.0;
    int it = 0;
    for (;; ++it) {
      const MonotoneEval ev = monotone(X, true);
      const Eigen::VectorXd grad = X - rhs + dt * ev.gradient;
      residual = grad.norm();
      if (!std::isfinite(residual)) {
        throw IntegratorError("non-finite residual in implicit solve", residual, it);
      }
      if (residual <= tol) break;
      if (it >= cfg.newton_max_iter) {
        std::ostringstream msg;
        msg << "Newton solve did not converge in " << cfg.newton_max_iter << " iterations (residual " << residual
            << ")";
        throw IntegratorError(msg.str(), residual, it);
      }
      const Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(N, N) + dt * ev.hessian;
      const Eigen::VectorXd delta = -hess.ldlt().solve(grad);
      const double objective = 0.5 * (X - rhs).squaredNorm() + dt * ev.potential;
      const double slope = grad.dot(delta);
      double step_len = 1.0;
      Eigen::VectorXd trial = X + delta;
      // Near the minimizer the predicted decrease drops below the rounding
      // level of the objective and the Armijo test becomes noise; Newton's
      // full step is then taken.
      const bool resolvable = -slope > 1e-13 * std::max(1.0, std::abs(objective));
      while (resolvable && step_len > 1e-10) {
        trial = X + step_len * delta;
        const double value = 0.5 * (trial - rhs).squaredNorm() + dt * monotone(trial, false).potential;
        if (value <= objective + 1e-4 * step_len * slope) break;
        step_len *= 0.5;
      }
      X = trial;
    }
    out.newton_iterations = it;
    out.newton_residual = residual;
    const DriftParts implicit_parts = drift_parts(X, t + dt);
    out.dissipation = -dt * X.dot(implicit_parts.stress);
    out.stabilization = -dt * X.dot(implicit_parts.stabilizer);
    out.state.coeffs = std::move(X);
  }
  out.state.time = t + dt;
  if (!all_finite(out.state.coeffs)) {
    throw IntegratorError("non-finite state after step at t = " + std::to_string(t), 0.0, out.newton_iterations);
  }
  return out;
}

Eigen::VectorXd assemble_drift(const ConstitutiveParams& params, const GalerkinSpace& space, const Forcing& forcing,
                               const VelocityState& state) {
  const GalerkinSystem sys(params, space, NoiseModel::make(NoiseFamily::kAdditive, space.dim(), 0, 0.0), forcing);
  return sys.drift(state.coeffs, state.time);
}

Eigen::MatrixXd assemble_diffusion(const NoiseModel& model, const GalerkinSpace& space, const VelocityState& state) {
  const GalerkinSystem sys(ConstitutiveParams::make(space.dim(), 2.0, 1.0, 0.0), space, model, Forcing::zero());
  return sys.diffusion(state.coeffs);
}

double trilinear_convection(const GalerkinSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& w) {
  const GridField uf = space.synthesize(u);
  const GridField vf = space.synthesize(v);
  const MatrixField gw = space.gradient(w);
  const int d = space.dim();
  double sum = 0.0;
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const double* a = uf.at(pt);
    const double* b = vf.at(pt);
    const double* g = gw.at(pt);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) sum += a[i] * b[j] * g[i * d + j];
  }
  return sum * space.cell_volume();
}

StepResult step(const ConstitutiveParams& params, const GalerkinSpace& space, const NoiseModel& noise,
                const Forcing& forcing, const VelocityState& state, const SdeStepConfig& cfg, const WienerPath& path,
                std::int64_t step_index) {
  const GalerkinSystem sys(params, space, noise, forcing);
  WienerPath p = path;
  p.dt = cfg.dt;
  p.K = noise.K;
  return sys.step(state, cfg, p.increments(step_index));
}

VelocityState project_initial(const GalerkinSpace& space, const GridField& field) {
  for (double x : field.values)
    if (!std::isfinite(x)) throw std::invalid_argument("initial field has non-finite entries");
  return {space.analyze(field), 0.0};
}

}  // namespace powerlaw
