#include "powerlaw/spectral.hpp"

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace powerlaw::spectral {

namespace {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// fftw planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(int d, int M, Spectrum& data, int sign) {
  int dims[3] = {M, M, M};
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(d, dims, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

// Wavenumber of index i along one axis; 0 flags the Nyquist index for even M.
struct Wavenumbers {
  int d;
  int M;
  std::vector<double> k;
  std::vector<bool> nyquist;

  Wavenumbers(int dim, int grid) : d(dim), M(grid), k(grid), nyquist(grid, false) {
    for (int i = 0; i < M; ++i) {
      k[i] = i <= (M - 1) / 2 ? i : i - M;
      if (M % 2 == 0 && i == M / 2) {
        nyquist[i] = true;
        k[i] = 0.0;
      }
    }
  }

  // Wavevector of flat spectral index; returns false for the mean or Nyquist.
  bool vector(std::size_t index, double kv[3]) const {
    kv[0] = kv[1] = kv[2] = 0.0;
    bool resolved = true;
    bool nonzero = false;
    for (int a = d - 1; a >= 0; --a) {
      const int i = static_cast<int>(index % M);
      index /= M;
      if (nyquist[i]) resolved = false;
      kv[a] = k[i];
      if (k[i] != 0.0) nonzero = true;
    }
    return resolved && nonzero;
  }
};

template <int Rank>
Spectrum forward_component(const GridTensor<Rank>& f, int comp) {
  const std::size_t n = f.points();
  Spectrum s(n);
  const int nc = f.components();
  for (std::size_t pt = 0; pt < n; ++pt) s[pt] = Complex(f.values[pt * nc + comp], 0.0);
  transform(f.d, f.M, s, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : s) c *= scale;
  return s;
}

template <int Rank>
void backward_component(Spectrum s, GridTensor<Rank>& out, int comp) {
  transform(out.d, out.M, s, FFTW_BACKWARD);
  const int nc = out.components();
  for (std::size_t pt = 0; pt < s.size(); ++pt) out.values[pt * nc + comp] = s[pt].real();
}

// Apply the scalar multiplier m(k) to f.
template <class Multiplier>
ScalarField apply(const ScalarField& f, Multiplier&& m) {
  Wavenumbers wn(f.d, f.M);
  Spectrum s = forward_component(f, 0);
  double kv[3];
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = wn.vector(i, kv) ? s[i] * m(kv) : Complex(0.0);
  ScalarField out(f.d, f.M);
  backward_component(std::move(s), out, 0);
  return out;
}

double norm_sq(const double kv[3]) { return kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]; }

}  // namespace

ScalarField inverse_laplacian(const ScalarField& f) {
  return apply(f, [](const double* kv) { return Complex(-1.0 / norm_sq(kv), 0.0); });
}

ScalarField laplacian(const ScalarField& f) {
  return apply(f, [](const double* kv) { return Complex(-norm_sq(kv), 0.0); });
}

ScalarField divergence(const GridField& u) {
  Wavenumbers wn(u.d, u.M);
  Spectrum acc(u.points(), Complex(0.0));
  double kv[3];
  for (int i = 0; i < u.d; ++i) {
    Spectrum s = forward_component(u, i);
    for (std::size_t n = 0; n < s.size(); ++n)
      if (wn.vector(n, kv)) acc[n] += Complex(0.0, kv[i]) * s[n];
  }
  ScalarField out(u.d, u.M);
  backward_component(std::move(acc), out, 0);
  return out;
}

ScalarField div_div(const MatrixField& H) {
  Wavenumbers wn(H.d, H.M);
  Spectrum acc(H.points(), Complex(0.0));
  double kv[3];
  const int d = H.d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Spectrum s = forward_component(H, i * d + j);
      for (std::size_t n = 0; n < s.size(); ++n)
        if (wn.vector(n, kv)) acc[n] += -kv[i] * kv[j] * s[n];
    }
  }
  ScalarField out(d, H.M);
  backward_component(std::move(acc), out, 0);
  return out;
}

GridField gradient(const ScalarField& f) {
  Wavenumbers wn(f.d, f.M);
  const Spectrum s = forward_component(f, 0);
  GridField out(f.d, f.M);
  double kv[3];
  for (int j = 0; j < f.d; ++j) {
    Spectrum g(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) g[n] = wn.vector(n, kv) ? Complex(0.0, kv[j]) * s[n] : Complex(0.0);
    backward_component(std::move(g), out, j);
  }
  return out;
}

MatrixField gradient_inverse_laplacian(const GridField& g) {
  Wavenumbers wn(g.d, g.M);
  MatrixField out(g.d, g.M);
  double kv[3];
  const int d = g.d;
  for (int i = 0; i < d; ++i) {
    const Spectrum s = forward_component(g, i);
    for (int j = 0; j < d; ++j) {
      Spectrum t(s.size());
      for (std::size_t n = 0; n < s.size(); ++n)
        t[n] = wn.vector(n, kv) ? Complex(0.0, kv[j]) * s[n] / (-norm_sq(kv)) : Complex(0.0);
      backward_component(std::move(t), out, i * d + j);
    }
  }
  return out;
}

ScalarField pressure_from_stress(const MatrixField& H) {
  Wavenumbers wn(H.d, H.M);
  Spectrum acc(H.points(), Complex(0.0));
  double kv[3];
  const int d = H.d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Spectrum s = forward_component(H, i * d + j);
      for (std::size_t n = 0; n < s.size(); ++n)
        if (wn.vector(n, kv)) acc[n] += -kv[i] * kv[j] * s[n] / norm_sq(kv);
    }
  }
  ScalarField out(d, H.M);
  backward_component(std::move(acc), out, 0);
  return out;
}

ScalarField pressure_from_flux(const GridField& F) {
  Wavenumbers wn(F.d, F.M);
  Spectrum acc(F.points(), Complex(0.0));
  double kv[3];
  for (int i = 0; i < F.d; ++i) {
    Spectrum s = forward_component(F, i);
    for (std::size_t n = 0; n < s.size(); ++n)
      if (wn.vector(n, kv)) acc[n] += Complex(0.0, kv[i]) * s[n] / norm_sq(kv);
  }
  ScalarField out(F.d, F.M);
  backward_component(std::move(acc), out, 0);
  return out;
}

}  // namespace powerlaw::spectral
