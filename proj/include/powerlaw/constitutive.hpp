#pragma once

#include <optional>

#include <Eigen/Dense>

namespace powerlaw {

// Small dense types with a compile-time upper bound of 3 (d <= 3).
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
// Linear maps on flattened d x d matrices (row-major flattening i * d + j).
using TangentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 9>;

// Parameters of S(eps) = nu0 (1 + |eps|)^{p-2} eps and s(v) = alpha |v|^{q-2} v.
struct ConstitutiveParams {
  double p = 2.0;
  double nu0 = 1.0;
  double q = 3.0;
  double alpha = 0.0;
  int d = 2;

  // Validates p > 1, nu0 > 0, alpha >= 0, d in {2,3}; when alpha > 0 also
  // q >= max{2p', 3}. A missing q is filled with that minimum.
  static ConstitutiveParams make(int d, double p, double nu0, double alpha, std::optional<double> q = std::nullopt);

  double conjugate_exponent() const { return p / (p - 1.0); }
  // p > (2d + 2) / (d + 2)
  bool admissible_for_existence() const;
};

double existence_threshold(int d);
double minimal_stabilization_exponent(double p);

double frobenius_norm(const SmallMatrix& m);

// Throws std::invalid_argument if eps is not symmetric within 1e-10.
SmallMatrix eval_stress(const ConstitutiveParams& params, const SmallMatrix& eps);

// F(eps) = nu0 int_0^{|eps|} (1 + s)^{p-2} s ds; grad F = S.
double stress_potential(const ConstitutiveParams& params, const SmallMatrix& eps);
double stress_potential_of_norm(const ConstitutiveParams& params, double t);

// (S(eps1) - S(eps2)) : (eps1 - eps2)
double monotonicity_gap(const ConstitutiveParams& params, const SmallMatrix& eps1, const SmallMatrix& eps2);

SmallVector eval_stabilizer(const ConstitutiveParams& params, const SmallVector& v);

// Derivative DS(eps) acting on symmetric directions, expressed on flattened
// matrices and composed with symmetrization.
TangentMatrix stress_tangent(const ConstitutiveParams& params, const SmallMatrix& eps);
SmallMatrix stabilizer_tangent(const ConstitutiveParams& params, const SmallVector& v);

struct GrowthCheck {
  bool ok = true;
  double stress_norm = 0.0;     // |S(eps)|
  double growth_bound = 0.0;    // nu0 (1 + |eps|)^{p-1}
  double coercive_lhs = 0.0;    // S(eps) : eps
  double coercive_rhs = 0.0;    // c |eps|^p - c
  std::optional<SmallMatrix> violating;
};

// Coercivity constant c = nu0 2^{1-p} used in the lower bound.
double coercivity_constant(const ConstitutiveParams& params);

// |S(eps)| <= nu0 (1 + |eps|)^{p-1} and S(eps):eps >= c|eps|^p - c.
GrowthCheck growth_bounds_check(const ConstitutiveParams& params, const SmallMatrix& eps);

}  // namespace powerlaw
