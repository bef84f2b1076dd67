#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "powerlaw/constitutive.hpp"
#include "powerlaw/grid.hpp"

namespace powerlaw {

enum class NoiseFamily { kAdditive, kLinear, kSmoothNorm };

std::string to_string(NoiseFamily family);
NoiseFamily parse_noise_family(const std::string& name);

// Superposition noise Phi(z) e_k = g_k(z(.)) truncated to K Wiener modes.
//   additive:    g_k(xi) = sigma a_k u_k
//   linear:      g_k(xi) = sigma a_k xi
//   smooth_norm: g_k(xi) = sigma a_k (1 + |xi|^2)^{1/2} u_k
// with a_k = 2^{-k} and u_k = e_{(k-1) mod d}.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::kLinear;
  int d = 2;
  int K = 16;
  double amplitude = 1.0;
  std::vector<double> per_mode_scale;

  static NoiseModel make(NoiseFamily family, int d, int K = 16, double amplitude = 1.0);

  // Documented L with sum_k |g_k(xi)| <= L (1 + |xi|) and sum_k |grad g_k|^2 <= L.
  double growth_constant() const;
  // Documented c with sup_k k^2 |g_k(xi)|^2 <= c (1 + |xi|^2).
  double decay_constant() const;
  // sum_{k > K} a_k^2 relative to the full series: the truncation error of
  // the Hilbert-Schmidt norm.
  double truncation_tail() const;
  bool enabled() const { return amplitude != 0.0 && K > 0; }
};

// Mode index k is 1-based as in W = sum_k e_k beta_k; throws for k outside [1, K].
SmallVector eval_g(const NoiseModel& model, int k, const SmallVector& xi);
SmallMatrix eval_g_jacobian(const NoiseModel& model, int k, const SmallVector& xi);

// Phi(v) e_k for k = 1..K as grid fields.
std::vector<GridField> apply_phi(const NoiseModel& model, const GridField& field);

// sum_k int |Phi(v) e_k|^2 dx
double hilbert_schmidt_norm_sq(std::span<const GridField> phi_fields);

// ||e||_{U0} = (sum_k alpha_k^2 / k^2)^{1/2}
double u0_norm(std::span<const double> coeffs);

// Brownian increments beta_k(t + dt) - beta_k(t) derived from a counter-based
// stream: every draw is a pure function of (seed, fine step, mode). With
// substeps > 1 an increment is the sum of `substeps` finer increments, so
// paths at dt and dt / 2 share the same underlying Brownian motion.
struct WienerPath {
  std::uint64_t seed = 0;
  double dt = 1e-2;
  int K = 16;
  int substeps = 1;

  double increment(std::int64_t step, int mode) const;
  Eigen::VectorXd increments(std::int64_t step) const;
};

// Standard normal draw keyed by (seed, index, mode).
double keyed_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t mode);

// Deterministic seed for ensemble member `member` derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t member);

inline Eigen::VectorXd sample_increments(const WienerPath& path, std::int64_t step) { return path.increments(step); }

}  // namespace powerlaw
