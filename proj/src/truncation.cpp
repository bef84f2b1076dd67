#include "powerlaw/truncation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace powerlaw {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 15.
constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

// int_0^x psi(u) u du
double integral_psi_u(double x) {
  if (x <= 1.0) return 0.5 * x * x;
  const double b = std::min(x, 2.0);
  const double half = 0.5 * (b - 1.0);
  const double mid = 0.5 * (b + 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
    const double u = mid + half * kGaussNodes[i];
    sum += kGaussWeights[i] * eval_psi(u) * u;
  }
  return 0.5 + half * sum;
}

void check_level(const TruncationFamily& fam) {
  if (fam.L < 0) throw std::invalid_argument("truncation level count L must be >= 0");
}

}  // namespace

TruncationFamily TruncationFamily::make(int L) {
  TruncationFamily fam{L};
  check_level(fam);
  return fam;
}

double eval_psi(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("psi is defined for s >= 0");
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double eval_dpsi(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("psi is defined for s >= 0");
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return -30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double eval_psi_delta(double delta, double s) { return eval_psi(delta * s); }

double eval_Psi_L(const TruncationFamily& fam, double s) {
  check_level(fam);
  double sum = 0.0;
  for (int l = 1; l <= fam.L; ++l) sum += eval_psi(std::ldexp(s, -l));
  return sum;
}

double eval_dPsi_L(const TruncationFamily& fam, double s) {
  check_level(fam);
  double sum = 0.0;
  for (int l = 1; l <= fam.L; ++l) sum += std::ldexp(eval_dpsi(std::ldexp(s, -l)), -l);
  return sum;
}

double eval_h_L(const TruncationFamily& fam, double s) {
  check_level(fam);
  if (!(s >= 0.0)) throw std::invalid_argument("h_L is defined for s >= 0");
  // Substituting u = 2^{-l} theta turns each level into 4^l int_0^{2^{-l}s} psi(u) u du.
  double sum = 0.0;
  for (int l = 1; l <= fam.L; ++l) sum += std::ldexp(integral_psi_u(std::ldexp(s, -l)), 2 * l);
  return sum;
}

double eval_H_L(const TruncationFamily& fam, const SmallVector& xi) { return eval_h_L(fam, xi.norm()); }

double max_s_dpsi() {
  // s |psi'(s)| = 30 (1 + t) t^2 (1 - t)^2; its derivative vanishes where
  // 5 t^2 + t - 2 = 0 on (0, 1).
  const double t = (-1.0 + std::sqrt(41.0)) / 10.0;
  return 30.0 * (1.0 + t) * t * t * (1.0 - t) * (1.0 - t);
}

double gradient_bound_ratio(const TruncationFamily& fam, const GalerkinSpace& space, const Eigen::VectorXd& coeffs) {
  check_level(fam);
  const int d = space.dim();
  const GridField u = space.synthesize(coeffs);
  const MatrixField grad = space.gradient(coeffs);
  double best = 0.0;
  for (std::size_t pt = 0; pt < space.points(); ++pt) {
    const double* v = u.at(pt);
    const double* g = grad.at(pt);
    double vn2 = 0.0, gn2 = 0.0;
    for (int i = 0; i < d; ++i) vn2 += v[i] * v[i];
    for (int i = 0; i < d * d; ++i) gn2 += g[i] * g[i];
    const double gn = std::sqrt(gn2);
    const double vn = std::sqrt(vn2);
    if (gn <= 1e-8 || vn == 0.0) continue;
    // d_j |u| = sum_i u_i d_j u_i / |u|
    double abs_grad2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double c = 0.0;
      for (int i = 0; i < d; ++i) c += v[i] * g[i * d + j];
      abs_grad2 += (c / vn) * (c / vn);
    }
    // |a (x) b| = |a| |b|
    const double ratio = std::abs(eval_dPsi_L(fam, vn)) * std::sqrt(abs_grad2) * vn / gn;
    best = std::max(best, ratio);
  }
  return best;
}

}  // namespace powerlaw
