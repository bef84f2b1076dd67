#pragma once

#include "powerlaw/grid.hpp"

namespace powerlaw::spectral {

// Fourier-multiplier operators on grid samples of periodic fields. Every
// operator acts on the trigonometric interpolant of its input; the zero mode
// and (for even M) the Nyquist modes are removed, so outputs have zero mean.

// Delta^{-1} f (mean of f discarded).
ScalarField inverse_laplacian(const ScalarField& f);

ScalarField laplacian(const ScalarField& f);

ScalarField divergence(const GridField& u);

// sum_ij d_i d_j H_ij
ScalarField div_div(const MatrixField& H);

GridField gradient(const ScalarField& f);

// G_ij = d_j (Delta^{-1} g_i), so that div G = g - mean(g).
MatrixField gradient_inverse_laplacian(const GridField& g);

// -Delta^{-1} div div H: the unique mean-zero pi with
// int pi Laplace(phi) = -int H : grad^2 phi for every resolved phi.
ScalarField pressure_from_stress(const MatrixField& H);

// -Delta^{-1} div F: the unique mean-zero pi with
// int pi Laplace(phi) = int F . grad(phi) for every resolved phi.
ScalarField pressure_from_flux(const GridField& F);

}  // namespace powerlaw::spectral
