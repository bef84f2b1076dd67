#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace powerlaw {

// Samples of a rank-0/1/2 tensor field on the uniform M^d collocation grid of
// the torus [0, 2pi)^d. Storage is point-major: the components of one grid
// point are contiguous. Points are ordered row-major with axis 0 slowest.
template <int Rank>
struct GridTensor {
  int d = 2;
  int M = 0;
  std::vector<double> values;

  GridTensor() = default;
  GridTensor(int dim, int grid) : d(dim), M(grid), values(points() * components(), 0.0) {}

  static constexpr int rank() { return Rank; }

  int components() const {
    if constexpr (Rank == 0) return 1;
    else if constexpr (Rank == 1) return d;
    else return d * d;
  }

  std::size_t points() const {
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(M);
    return n;
  }

  double domain_measure() const { return std::pow(2.0 * std::numbers::pi, d); }
  double cell_volume() const { return domain_measure() / static_cast<double>(points()); }

  double* at(std::size_t point) { return values.data() + point * components(); }
  const double* at(std::size_t point) const { return values.data() + point * components(); }

  bool same_shape(const GridTensor& other) const {
    return d == other.d && M == other.M && values.size() == other.values.size();
  }

  GridTensor& operator+=(const GridTensor& other) {
    if (!same_shape(other)) throw std::invalid_argument("grid field shape mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
  }

  GridTensor& operator*=(double a) {
    for (double& v : values) v *= a;
    return *this;
  }
};

using ScalarField = GridTensor<0>;
using GridField = GridTensor<1>;
using MatrixField = GridTensor<2>;

// Trapezoidal (= exact trigonometric) quadrature of a scalar field.
inline double integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.cell_volume();
}

inline double spatial_mean(const ScalarField& f) { return integrate(f) / f.domain_measure(); }

// Discrete L2 inner product of two fields of equal shape (full contraction).
template <int Rank>
double inner(const GridTensor<Rank>& a, const GridTensor<Rank>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("grid field shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += a.values[i] * b.values[i];
  return sum * a.cell_volume();
}

// Coordinates of a grid point; unused trailing entries are zero.
inline std::array<double, 3> grid_point(int d, int M, std::size_t index) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double h = 2.0 * std::numbers::pi / M;
  for (int a = d - 1; a >= 0; --a) {
    x[a] = h * static_cast<double>(index % M);
    index /= M;
  }
  return x;
}

}  // namespace powerlaw
