#include "powerlaw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace powerlaw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Minimal UniformRandomBitGenerator over a splitmix64 counter stream.
class CounterEngine {
 public:
  using result_type = std::uint64_t;
  explicit CounterEngine(std::uint64_t key) : state_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return splitmix64(state_++ * 0x2545f4914f6cdd1dULL); }

 private:
  std::uint64_t state_;
};

SmallVector unit_axis(int d, int k) {
  SmallVector u = SmallVector::Zero(d);
  u((k - 1) % d) = 1.0;
  return u;
}

void check_mode(const NoiseModel& model, int k) {
  if (k < 1 || k > model.K) throw std::out_of_range("noise mode index out of range");
}

}  // namespace

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kAdditive: return "additive";
    case NoiseFamily::kLinear: return "linear";
    case NoiseFamily::kSmoothNorm: return "smooth_norm";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "additive") return NoiseFamily::kAdditive;
  if (name == "linear") return NoiseFamily::kLinear;
  if (name == "smooth_norm") return NoiseFamily::kSmoothNorm;
  throw std::invalid_argument("unknown noise family '" + name + "' (expected additive, linear or smooth_norm)");
}

NoiseModel NoiseModel::make(NoiseFamily family, int d, int K, double amplitude) {
  if (d != 2 && d != 3) throw std::invalid_argument("noise dimension must be 2 or 3");
  if (K < 0) throw std::invalid_argument("noise mode count K must be >= 0");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
  NoiseModel m;
  m.family = family;
  m.d = d;
  m.K = K;
  m.amplitude = amplitude;
  m.per_mode_scale.resize(K);
  for (int k = 1; k <= K; ++k) m.per_mode_scale[k - 1] = std::ldexp(1.0, -k);
  return m;
}

double NoiseModel::growth_constant() const {
  const double s = amplitude;
  switch (family) {
    case NoiseFamily::kAdditive: return s;
    // sum |grad g_k|^2 = s^2 d sum 4^{-k} <= s^2 d / 3; L = d covers s = 1.
    case NoiseFamily::kLinear: return std::max(s, s * s * d);
    case NoiseFamily::kSmoothNorm: return std::max(s, s * s);
  }
  return s;
}

// k^2 4^{-k} peaks at 1/4 (k = 1, 2).
double NoiseModel::decay_constant() const { return 0.25 * amplitude * amplitude; }

double NoiseModel::truncation_tail() const { return std::ldexp(1.0, -2 * K); }

SmallVector eval_g(const NoiseModel& model, int k, const SmallVector& xi) {
  check_mode(model, k);
  const double a = model.amplitude * model.per_mode_scale[k - 1];
  switch (model.family) {
    case NoiseFamily::kAdditive: return a * unit_axis(model.d, k);
    case NoiseFamily::kLinear: return a * xi;
    case NoiseFamily::kSmoothNorm: return a * std::sqrt(1.0 + xi.squaredNorm()) * unit_axis(model.d, k);
  }
  return SmallVector::Zero(model.d);
}

SmallMatrix eval_g_jacobian(const NoiseModel& model, int k, const SmallVector& xi) {
  check_mode(model, k);
  const int d = model.d;
  const double a = model.amplitude * model.per_mode_scale[k - 1];
  switch (model.family) {
    case NoiseFamily::kAdditive: return SmallMatrix::Zero(d, d);
    case NoiseFamily::kLinear: return a * SmallMatrix::Identity(d, d);
    case NoiseFamily::kSmoothNorm:
      return a * unit_axis(d, k) * xi.transpose() / std::sqrt(1.0 + xi.squaredNorm());
  }
  return SmallMatrix::Zero(d, d);
}

std::vector<GridField> apply_phi(const NoiseModel& model, const GridField& field) {
  if (field.d != model.d) throw std::invalid_argument("noise model and field dimension differ");
  std::vector<GridField> out(model.K, GridField(field.d, field.M));
  const int d = field.d;
  SmallVector xi(d);
  for (std::size_t pt = 0; pt < field.points(); ++pt) {
    for (int i = 0; i < d; ++i) xi(i) = field.at(pt)[i];
    for (int k = 1; k <= model.K; ++k) {
      const SmallVector g = eval_g(model, k, xi);
      for (int i = 0; i < d; ++i) out[k - 1].at(pt)[i] = g(i);
    }
  }
  return out;
}

double hilbert_schmidt_norm_sq(std::span<const GridField> phi_fields) {
  double sum = 0.0;
  for (const auto& f : phi_fields) sum += inner(f, f);
  return sum;
}

double u0_norm(std::span<const double> coeffs) {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double a = coeffs[k - 1];
    sum += a * a / static_cast<double>(k * k);
  }
  return std::sqrt(sum);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t member) {
  return splitmix64(splitmix64(base) ^ (member * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double keyed_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t mode) {
  const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (mode + 0x632be59bd9b4e019ULL));
  CounterEngine engine(key);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

double WienerPath::increment(std::int64_t step, int mode) const {
  if (!(dt >= 0.0)) throw std::invalid_argument("Wiener path time step must be >= 0");
  if (step < 0) throw std::invalid_argument("step index must be >= 0");
  const int sub = std::max(1, substeps);
  const double scale = std::sqrt(dt / sub);
  double sum = 0.0;
  for (int s = 0; s < sub; ++s) {
    sum += keyed_normal(seed, static_cast<std::uint64_t>(step) * sub + s, static_cast<std::uint64_t>(mode));
  }
  return scale * sum;
}

Eigen::VectorXd WienerPath::increments(std::int64_t step) const {
  Eigen::VectorXd out(K);
  for (int k = 0; k < K; ++k) out(k) = increment(step, k + 1);
  return out;
}

}  // namespace powerlaw
