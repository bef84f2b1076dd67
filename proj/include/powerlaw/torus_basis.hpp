#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "powerlaw/grid.hpp"

namespace powerlaw {

enum class Parity { kCosine = 0, kSine = 1 };

// One divergence-free Fourier eigenfunction of the Stokes operator on the
// torus: w(x) = A * pol * cos(xi.x) (or sin), A = sqrt(2 / (2pi)^d).
// Eigenvalue |xi|^2. Only the canonical half-space representative of each
// {xi, -xi} pair is used (first nonzero component positive).
struct WaveMode {
  std::array<int, 3> xi{0, 0, 0};
  Parity parity = Parity::kCosine;
  int pol_index = 0;
  std::array<double, 3> pol{0.0, 0.0, 0.0};

  int norm_sq() const { return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]; }
  double eigenvalue() const { return static_cast<double>(norm_sq()); }
  int max_component() const;
};

// All modes with |xi|^2 <= max_norm_sq, in basis order.
std::vector<WaveMode> enumerate_modes(int d, int max_norm_sq);

// The first n_modes modes in basis order; these span X_N.
std::vector<WaveMode> leading_modes(int d, int n_modes);

// Smallest admissible collocation resolution for the first n_modes modes
// (M >= 2 kmax + 1).
int minimal_grid(int d, int n_modes);

// Resolution that additionally integrates cubic products of the velocity
// exactly (M >= 3 kmax + 1), so the trilinear form keeps its skew symmetry.
int dealiased_grid(int d, int n_modes);

// Span X_N of the first N Stokes eigenfunctions together with their samples on
// the collocation grid. Immutable; copies share the tabulated data.
class GalerkinSpace {
 public:
  int dim() const { return data_->d; }
  int size() const { return static_cast<int>(data_->modes.size()); }
  int grid() const { return data_->M; }
  std::size_t points() const { return data_->points; }
  double cell_volume() const { return data_->cell_volume; }
  double domain_measure() const { return data_->cell_volume * static_cast<double>(data_->points); }
  int max_wavenumber() const { return data_->kmax; }

  const std::vector<WaveMode>& modes() const { return data_->modes; }
  const WaveMode& mode(int k) const { return data_->modes.at(k); }
  double eigenvalue(int k) const { return data_->modes.at(k).eigenvalue(); }

  // values(pt * d + i, k) = (w_k)_i(x_pt)
  const Eigen::MatrixXd& values() const { return data_->values; }
  // gradients(pt * d * d + i * d + j, k) = d_j (w_k)_i (x_pt)
  const Eigen::MatrixXd& gradients() const { return data_->gradients; }

  GridField synthesize(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd analyze(const GridField& field) const;
  // (grad v)_{ij} = d_j v_i
  MatrixField gradient(const Eigen::VectorXd& coeffs) const;
  MatrixField symmetric_gradient(const Eigen::VectorXd& coeffs) const;
  ScalarField divergence(const Eigen::VectorXd& coeffs) const;

  // Sample a single mode (not necessarily part of this space) on this grid.
  GridField sample_mode(const WaveMode& mode) const;

  friend GalerkinSpace build_space(int d, int n_modes, int grid);

 private:
  struct Data {
    int d = 2;
    int M = 0;
    int kmax = 0;
    std::size_t points = 0;
    double cell_volume = 0.0;
    std::vector<WaveMode> modes;
    Eigen::MatrixXd values;
    Eigen::MatrixXd gradients;
  };
  explicit GalerkinSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  void check_coeffs(const Eigen::VectorXd& coeffs) const;

  std::shared_ptr<const Data> data_;
};

// Throws std::invalid_argument for d not in {2,3}, n_modes < 1 or a grid
// below the oversampling bound.
GalerkinSpace build_space(int d, int n_modes, int grid);

inline GridField synthesize(const GalerkinSpace& space, const Eigen::VectorXd& coeffs) {
  return space.synthesize(coeffs);
}
inline Eigen::VectorXd analyze(const GalerkinSpace& space, const GridField& field) {
  return space.analyze(field);
}
inline MatrixField symmetric_gradient(const GalerkinSpace& space, const Eigen::VectorXd& coeffs) {
  return space.symmetric_gradient(coeffs);
}

}  // namespace powerlaw
