#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "powerlaw/constitutive.hpp"
#include "powerlaw/grid.hpp"
#include "powerlaw/noise.hpp"
#include "powerlaw/torus_basis.hpp"

namespace powerlaw {

struct VelocityState {
  Eigen::VectorXd coeffs;
  double time = 0.0;
};

// Deterministic body force f(t, .). A time series holds one field per
// integrator step; f(t) picks the sample of step floor(t / dt + 1/2), clamped.
class Forcing {
 public:
  enum class Mode { kZero, kSteady, kTimeSeries };

  static Forcing zero() { return Forcing(); }
  static Forcing steady(GridField field);
  static Forcing time_series(std::vector<GridField> fields, double dt);

  Mode mode() const { return mode_; }
  // nullptr when the force vanishes.
  const GridField* at(double t) const;
  // int_0^T ||f(t)||_{L2}^2 dt (left-point rule for a time series).
  double space_time_norm_sq(double T) const;

 private:
  Mode mode_ = Mode::kZero;
  std::vector<GridField> fields_;
  double dt_ = 0.0;
};

enum class Scheme { kEulerMaruyama, kSemiImplicit };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct SdeStepConfig {
  double dt = 1e-2;
  Scheme scheme = Scheme::kSemiImplicit;
  // Newton stops once |grad J| <= newton_tol * max(1, |rhs|).
  double newton_tol = 1e-10;
  int newton_max_iter = 50;

  void validate() const;
};

class IntegratorError : public std::runtime_error {
 public:
  IntegratorError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Drift mu(t, C) split by equation term.
struct DriftParts {
  Eigen::VectorXd stress;       // -int S(eps(v)) : eps(w_k)
  Eigen::VectorXd convection;   // +int v (x) v : grad w_k
  Eigen::VectorXd stabilizer;   // -alpha int |v|^{q-2} v . w_k
  Eigen::VectorXd forcing;      // +int f . w_k

  Eigen::VectorXd total() const { return stress + convection + stabilizer + forcing; }
};

// Spatial integrals of one Galerkin state, all by collocation quadrature.
struct StateIntegrals {
  double l2_sq = 0.0;          // int |v|^2
  double stress_work = 0.0;    // int S(eps(v)) : eps(v)
  double grad_lp = 0.0;        // int |grad v|^p
  double lq = 0.0;             // int |v|^q
  double lr0 = 0.0;            // int |v|^{r0}, r0 = p (d + 2) / d
  double stress_potential = 0.0;  // int F(eps(v))
};

struct StepResult {
  VelocityState state;
  Eigen::VectorXd dbeta;
  int newton_iterations = 0;
  double newton_residual = 0.0;
  // Terms of the discrete energy balance, evaluated where the scheme
  // evaluates them (left point, or the implicit point for the monotone part).
  double dissipation = 0.0;     // dt int S : eps
  double stabilization = 0.0;   // dt alpha int |v|^q
  double forcing_work = 0.0;    // dt int f . v
  double martingale = 0.0;      // sum_l (int v . Phi(v) e_l) dbeta_l
  double quadratic_variation = 0.0;  // dt |Sigma(C)|_F^2
};

// The finite-dimensional SDE dC = mu(t, C) dt + Sigma(C) dbeta.
class GalerkinSystem {
 public:
  GalerkinSystem(ConstitutiveParams params, GalerkinSpace space, NoiseModel noise, Forcing forcing);

  const ConstitutiveParams& params() const { return params_; }
  const GalerkinSpace& space() const { return space_; }
  const NoiseModel& noise() const { return noise_; }
  const Forcing& forcing() const { return forcing_; }

  DriftParts drift_parts(const Eigen::VectorXd& coeffs, double t) const;
  Eigen::VectorXd drift(const Eigen::VectorXd& coeffs, double t) const { return drift_parts(coeffs, t).total(); }
  // N x K matrix Sigma_kl = int g_l(v) . w_k
  Eigen::MatrixXd diffusion(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd forcing_coeffs(double t) const;
  StateIntegrals integrals(const Eigen::VectorXd& coeffs) const;

  // Monotone part A(C) = (int S(eps(v)):eps(w_k) + alpha int |v|^{q-2} v.w_k)_k,
  // the gradient of the convex potential int F(eps(v)) + alpha/q int |v|^q.
  struct MonotoneEval {
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
    double potential = 0.0;
  };
  MonotoneEval monotone(const Eigen::VectorXd& coeffs, bool with_hessian) const;

  // One step with externally supplied Brownian increments.
  StepResult step(const VelocityState& state, const SdeStepConfig& cfg, const Eigen::VectorXd& dbeta) const;

 private:
  void check(const Eigen::VectorXd& coeffs) const;

  ConstitutiveParams params_;
  GalerkinSpace space_;
  NoiseModel noise_;
  Forcing forcing_;
  Eigen::VectorXd steady_forcing_;
};

Eigen::VectorXd assemble_drift(const ConstitutiveParams& params, const GalerkinSpace& space, const Forcing& forcing,
                               const VelocityState& state);

Eigen::MatrixXd assemble_diffusion(const NoiseModel& model, const GalerkinSpace& space, const VelocityState& state);

// int (u (x) v) : grad w dx for Galerkin coefficient vectors u, v, w.
double trilinear_convection(const GalerkinSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& w);

// Advances `state` by one step using the increments of `path` at `step_index`.
StepResult step(const ConstitutiveParams& params, const GalerkinSpace& space, const NoiseModel& noise,
                const Forcing& forcing, const VelocityState& state, const SdeStepConfig& cfg, const WienerPath& path,
                std::int64_t step_index);

// v^N(0) = P^N v0
VelocityState project_initial(const GalerkinSpace& space, const GridField& field);

}  // namespace powerlaw
