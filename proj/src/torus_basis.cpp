#include "powerlaw/torus_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace powerlaw {

namespace {

bool in_half_space(const std::array<int, 3>& xi, int d) {
  for (int a = 0; a < d; ++a) {
    if (xi[a] > 0) return true;
    if (xi[a] < 0) return false;
  }
  return false;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

void normalize(std::array<double, 3>& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& c : v) c /= n;
}

// Unit vectors orthogonal to xi: one in 2d, two in 3d.
std::vector<std::array<double, 3>> polarizations(const std::array<int, 3>& xi, int d) {
  const std::array<double, 3> k{double(xi[0]), double(xi[1]), double(xi[2])};
  if (d == 2) {
    std::array<double, 3> t{-k[1], k[0], 0.0};
    normalize(t);
    return {t};
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(xi[a]) < std::abs(xi[axis])) axis = a;
  std::array<double, 3> e{0.0, 0.0, 0.0};
  e[axis] = 1.0;
  auto t1 = cross(k, e);
  normalize(t1);
  auto t2 = cross(k, t1);
  normalize(t2);
  return {t1, t2};
}

bool mode_less(const WaveMode& a, const WaveMode& b) {
  return std::make_tuple(a.norm_sq(), a.xi, static_cast<int>(a.parity), a.pol_index) <
         std::make_tuple(b.norm_sq(), b.xi, static_cast<int>(b.parity), b.pol_index);
}

}  // namespace

std::vector<WaveMode> leading_modes(int d, int n_modes) {
  int radius = 1;
  while (true) {
    auto modes = enumerate_modes(d, radius * radius);
    if (static_cast<int>(modes.size()) >= n_modes) {
      modes.resize(n_modes);
      return modes;
    }
    ++radius;
  }
}

int WaveMode::max_component() const {
  return std::max({std::abs(xi[0]), std::abs(xi[1]), std::abs(xi[2])});
}

std::vector<WaveMode> enumerate_modes(int d, int max_norm_sq) {
  if (d != 2 && d != 3) throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(d));
  const int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(max_norm_sq))));
  std::vector<WaveMode> modes;
  const int r3 = d == 3 ? r : 0;
  for (int a = -r; a <= r; ++a) {
    for (int b = -r; b <= r; ++b) {
      for (int c = -r3; c <= r3; ++c) {
        const std::array<int, 3> xi{a, b, c};
        if (!in_half_space(xi, d)) continue;
        if (a * a + b * b + c * c > max_norm_sq) continue;
        const auto pols = polarizations(xi, d);
        for (int parity = 0; parity < 2; ++parity) {
          for (int pi = 0; pi < static_cast<int>(pols.size()); ++pi) {
            WaveMode m;
            m.xi = xi;
            m.parity = static_cast<Parity>(parity);
            m.pol_index = pi;
            m.pol = pols[pi];
            modes.push_back(m);
          }
        }
      }
    }
  }
  std::sort(modes.begin(), modes.end(), mode_less);
  return modes;
}

int minimal_grid(int d, int n_modes) {
  int kmax = 0;
  for (const auto& m : leading_modes(d, n_modes)) kmax = std::max(kmax, m.max_component());
  return 2 * kmax + 1;
}

int dealiased_grid(int d, int n_modes) {
  int kmax = 0;
  for (const auto& m : leading_modes(d, n_modes)) kmax = std::max(kmax, m.max_component());
  return 3 * kmax + 1;
}

GalerkinSpace build_space(int d, int n_modes, int grid) {
  if (d != 2 && d != 3) throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(d));
  if (n_modes < 1) throw std::invalid_argument("mode count must be >= 1");

  auto data = std::make_shared<GalerkinSpace::Data>();
  data->d = d;
  data->M = grid;
  data->modes = leading_modes(d, n_modes);
  for (const auto& m : data->modes) data->kmax = std::max(data->kmax, m.max_component());
  if (grid < 2 * data->kmax + 1) {
    throw std::invalid_argument("grid resolution " + std::to_string(grid) + " below oversampling bound " +
                                std::to_string(2 * data->kmax + 1));
  }

  std::size_t npts = 1;
  for (int a = 0; a < d; ++a) npts *= static_cast<std::size_t>(grid);
  data->points = npts;
  data->cell_volume = std::pow(2.0 * std::numbers::pi, d) / static_cast<double>(npts);

  const double amp = std::sqrt(2.0 / std::pow(2.0 * std::numbers::pi, d));
  data->values.resize(static_cast<Eigen::Index>(npts * d), n_modes);
  data->gradients.resize(static_cast<Eigen::Index>(npts * d * d), n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const auto& m = data->modes[k];
    for (std::size_t pt = 0; pt < npts; ++pt) {
      const auto x = grid_point(d, grid, pt);
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += m.xi[a] * x[a];
      const double c = std::cos(phase), s = std::sin(phase);
      const double f = m.parity == Parity::kCosine ? c : s;
      const double df = m.parity == Parity::kCosine ? -s : c;
      for (int i = 0; i < d; ++i) {
        data->values(static_cast<Eigen::Index>(pt * d + i), k) = amp * m.pol[i] * f;
        for (int j = 0; j < d; ++j) {
          data->gradients(static_cast<Eigen::Index>(pt * d * d + i * d + j), k) = amp * m.pol[i] * m.xi[j] * df;
        }
      }
    }
  }
  return GalerkinSpace(std::move(data));
}

void GalerkinSpace::check_coeffs(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) {
    throw std::invalid_argument("coefficient vector has length " + std::to_string(coeffs.size()) + ", expected " +
                                std::to_string(size()));
  }
}

GridField GalerkinSpace::synthesize(const Eigen::VectorXd& coeffs) const {
  check_coeffs(coeffs);
  GridField out(dim(), grid());
  Eigen::Map<Eigen::VectorXd>(out.values.data(), static_cast<Eigen::Index>(out.values.size())) =
      data_->values * coeffs;
  return out;
}

Eigen::VectorXd GalerkinSpace::analyze(const GridField& field) const {
  if (field.d != dim() || field.M != grid() || field.values.size() != points() * dim()) {
    throw std::invalid_argument("grid field shape does not match the Galerkin space");
  }
  Eigen::Map<const Eigen::VectorXd> f(field.values.data(), static_cast<Eigen::Index>(field.values.size()));
  return cell_volume() * (data_->values.transpose() * f);
}

MatrixField GalerkinSpace::gradient(const Eigen::VectorXd& coeffs) const {
  check_coeffs(coeffs);
  MatrixField out(dim(), grid());
  Eigen::Map<Eigen::VectorXd>(out.values.data(), static_cast<Eigen::Index>(out.values.size())) =
      data_->gradients * coeffs;
  return out;
}

MatrixField GalerkinSpace::symmetric_gradient(const Eigen::VectorXd& coeffs) const {
  MatrixField g = gradient(coeffs);
  const int d = dim();
  for (std::size_t pt = 0; pt < points(); ++pt) {
    double* e = g.at(pt);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double sym = 0.5 * (e[i * d + j] + e[j * d + i]);
        e[i * d + j] = sym;
        e[j * d + i] = sym;
      }
    }
  }
  return g;
}

ScalarField GalerkinSpace::divergence(const Eigen::VectorXd& coeffs) const {
  const MatrixField g = gradient(coeffs);
  const int d = dim();
  ScalarField out(d, grid());
  for (std::size_t pt = 0; pt < points(); ++pt) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += g.at(pt)[i * d + i];
    out.values[pt] = tr;
  }
  return out;
}

GridField GalerkinSpace::sample_mode(const WaveMode& m) const {
  const int d = dim();
  const double amp = std::sqrt(2.0 / std::pow(2.0 * std::numbers::pi, d));
  GridField out(d, grid());
  for (std::size_t pt = 0; pt < points(); ++pt) {
    const auto x = grid_point(d, grid(), pt);
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += m.xi[a] * x[a];
    const double f = m.parity == Parity::kCosine ? std::cos(phase) : std::sin(phase);
    for (int i = 0; i < d; ++i) out.at(pt)[i] = amp * m.pol[i] * f;
  }
  return out;
}

}  // namespace powerlaw
