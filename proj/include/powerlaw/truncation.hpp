#pragma once

#include <Eigen/Dense>

#include "powerlaw/constitutive.hpp"
#include "powerlaw/torus_basis.hpp"

namespace powerlaw {

// Cutoff profile psi with psi = 1 on [0,1], psi = 0 on [2, inf) and the quintic
// smoothstep 1 - (6 t^5 - 15 t^4 + 10 t^3), t = s - 1, in between. psi is C^2
// and -psi' peaks at 15/8.
struct TruncationFamily {
  int L = 1;

  static TruncationFamily make(int L);
};

// Throws std::invalid_argument for s < 0.
double eval_psi(double s);
double eval_dpsi(double s);

// psi_delta(s) = psi(delta s)
double eval_psi_delta(double delta, double s);

// Psi_L(s) = sum_{l=1}^{L} psi(2^{-l} s)
double eval_Psi_L(const TruncationFamily& fam, double s);
double eval_dPsi_L(const TruncationFamily& fam, double s);

// h_L(s) = int_0^s Psi_L(theta) theta dtheta
double eval_h_L(const TruncationFamily& fam, double s);
// H_L(xi) = h_L(|xi|)
double eval_H_L(const TruncationFamily& fam, const SmallVector& xi);

// max_{s in [1,2]} s |psi'(s)|, the per-level constant of the chain-rule bound.
double max_s_dpsi();

// max over grid points with |grad u| > 1e-8 of |grad(Psi_L(|u|)) (x) u| / |grad u|.
double gradient_bound_ratio(const TruncationFamily& fam, const GalerkinSpace& space, const Eigen::VectorXd& coeffs);

}  // namespace powerlaw
