#include "powerlaw/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace powerlaw {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSlackTol = 1e-12;

void require_symmetric(const SmallMatrix& eps) {
  if (eps.rows() != eps.cols()) throw std::invalid_argument("strain must be square");
  if ((eps - eps.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw std::invalid_argument("strain tensor is not symmetric");
  }
}

}  // namespace

double existence_threshold(int d) { return (2.0 * d + 2.0) / (d + 2.0); }

double minimal_stabilization_exponent(double p) { return std::max(2.0 * p / (p - 1.0), 3.0); }

ConstitutiveParams ConstitutiveParams::make(int d, double p, double nu0, double alpha, std::optional<double> q) {
  if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3, got " + std::to_string(d));
  if (!(p > 1.0)) throw std::invalid_argument("p must satisfy p > 1, got " + std::to_string(p));
  if (!(nu0 > 0.0)) throw std::invalid_argument("nu0 must be > 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  ConstitutiveParams out;
  out.d = d;
  out.p = p;
  out.nu0 = nu0;
  out.alpha = alpha;
  const double qmin = minimal_stabilization_exponent(p);
  out.q = q.value_or(qmin);
  if (alpha > 0.0 && out.q < qmin - 1e-12) {
    throw std::invalid_argument("q must satisfy q >= max{2p', 3} = " + std::to_string(qmin));
  }
  if (!(out.q > 2.0)) throw std::invalid_argument("q must exceed 2");
  return out;
}

bool ConstitutiveParams::admissible_for_existence() const { return p > existence_threshold(d); }

double frobenius_norm(const SmallMatrix& m) { return std::sqrt(m.cwiseProduct(m).sum()); }

SmallMatrix eval_stress(const ConstitutiveParams& params, const SmallMatrix& eps) {
  require_symmetric(eps);
  const double t = frobenius_norm(eps);
  return params.nu0 * std::pow(1.0 + t, params.p - 2.0) * eps;
}

double stress_potential_of_norm(const ConstitutiveParams& params, double t) {
  const double p = params.p;
  return params.nu0 * (std::pow(1.0 + t, p - 1.0) * (t * (p - 1.0) - 1.0) + 1.0) / ((p - 1.0) * p);
}

double stress_potential(const ConstitutiveParams& params, const SmallMatrix& eps) {
  require_symmetric(eps);
  return stress_potential_of_norm(params, frobenius_norm(eps));
}

double monotonicity_gap(const ConstitutiveParams& params, const SmallMatrix& eps1, const SmallMatrix& eps2) {
  const SmallMatrix ds = eval_stress(params, eps1) - eval_stress(params, eps2);
  return ds.cwiseProduct(eps1 - eps2).sum();
}

SmallVector eval_stabilizer(const ConstitutiveParams& params, const SmallVector& v) {
  const double n = v.norm();
  if (n == 0.0) return SmallVector::Zero(v.size());
  return params.alpha * std::pow(n, params.q - 2.0) * v;
}

TangentMatrix stress_tangent(const ConstitutiveParams& params, const SmallMatrix& eps) {
  const int d = static_cast<int>(eps.rows());
  const int n = d * d;
  const double t = frobenius_norm(eps);
  const double a = params.nu0 * std::pow(1.0 + t, params.p - 2.0);
  // d/d eps of |eps| is eps / |eps|; the radial term vanishes at eps = 0.
  const double b = t > 0.0 ? params.nu0 * (params.p - 2.0) * std::pow(1.0 + t, params.p - 3.0) / t : 0.0;
  TangentMatrix sym = TangentMatrix::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      sym(i * d + j, i * d + j) += 0.5;
      sym(i * d + j, j * d + i) += 0.5;
    }
  }
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 9, 1> e(n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) e(i * d + j) = eps(i, j);
  TangentMatrix tangent = a * TangentMatrix::Identity(n, n) + b * e * e.transpose();
  return tangent * sym;
}

SmallMatrix stabilizer_tangent(const ConstitutiveParams& params, const SmallVector& v) {
  const int d = static_cast<int>(v.size());
  const double n = v.norm();
  if (n == 0.0 || params.alpha == 0.0) return SmallMatrix::Zero(d, d);
  const double q = params.q;
  return params.alpha * std::pow(n, q - 2.0) *
         (SmallMatrix::Identity(d, d) + (q - 2.0) * (v * v.transpose()) / (n * n));
}

double coercivity_constant(const ConstitutiveParams& params) { return params.nu0 * std::pow(2.0, 1.0 - params.p); }

GrowthCheck growth_bounds_check(const ConstitutiveParams& params, const SmallMatrix& eps) {
  GrowthCheck out;
  const SmallMatrix S = eval_stress(params, eps);
  const double t = frobenius_norm(eps);
  const double c = coercivity_constant(params);
  out.stress_norm = frobenius_norm(S);
  out.growth_bound = params.nu0 * std::pow(1.0 + t, params.p - 1.0);
  out.coercive_lhs = S.cwiseProduct(eps).sum();
  out.coercive_rhs = c * std::pow(t, params.p) - c;
  const double scale = 1.0 + out.growth_bound;
  out.ok = out.stress_norm <= out.growth_bound + kSlackTol * scale &&
           out.coercive_lhs >= out.coercive_rhs - kSlackTol * scale;
  if (!out.ok) out.violating = eps;
  return out;
}

}  // namespace powerlaw
