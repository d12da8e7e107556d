#pragma once

#include "nls/grid.hpp"

namespace nls {

// Unitary Fourier transform with the convention
//   u_hat(xi) = (2 pi)^{-d/2} \int e^{-i x xi} u(x) dx,
// discretised as the Riemann sum h^d (2 pi)^{-d/2} \sum_j e^{-i x_j xi_k} u_j.
// Output lives on grid.dual() in ascending-frequency order. Plancherel holds
// exactly in the discrete norms (h^d sum |u|^2 == dxi^d sum |u_hat|^2).
Field fourier(const Field& u);
Field inverse_fourier(const Field& uhat);

// In-place multiply of a frequency-side field by m(|xi|^2).
void for_each_freq_sq(Field& uhat, const std::function<cplx(double)>& m);

// Plain unnormalized DFT of a power-of-two-length sequence; sign -1 applies
// e^{-2 pi i jk/n} (forward), +1 the conjugate.
std::vector<cplx> plain_dft(const std::vector<cplx>& x, int sign);

// Band-limited (trigonometric) interpolation of u at one arbitrary point.
// O(N^d) per call; for whole-grid resampling use resample_scaled.
cplx point_eval(const Field& u, const double* x);

// Band-limited evaluation of u at the points alpha * y for every y in `out`,
// via a per-axis Bluestein chirp-z transform. Points that leave the source
// box sample the periodic interpolant (callers gate this with the boundary
// cap). Exact on the lattice: alpha == 1, out == u.grid returns u.
Field resample_scaled(const Field& u, double alpha, const Grid& out);

}  // namespace nls
