#include "nls/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "nls/kernels.hpp"

namespace nls {

namespace {

// One cached FFTW plan with its own aligned buffers; executes by copy-in /
// copy-out so callers never deal with alignment. Planning uses FFTW_ESTIMATE:
// plan choice is then a pure function of the size, which keeps every run of
// the same binary bit-identical.
struct PlanSlot {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t n = 0;

  PlanSlot(int dim, int npts, int sign) {
    n = dim == 1 ? std::size_t(npts) : std::size_t(npts) * npts;
    in = fftw_alloc_complex(n);
    out = fftw_alloc_complex(n);
    plan = dim == 1 ? fftw_plan_dft_1d(npts, in, out, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(npts, npts, in, out, sign, FFTW_ESTIMATE);
  }
  ~PlanSlot() {
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
  PlanSlot(const PlanSlot&) = delete;
  PlanSlot& operator=(const PlanSlot&) = delete;

  void execute(const cplx* src, cplx* dst) {
    auto* i = reinterpret_cast<cplx*>(in);
    auto* o = reinterpret_cast<cplx*>(out);
    std::copy(src, src + n, i);
    fftw_execute(plan);
    std::copy(o, o + n, dst);
  }
};

PlanSlot& plan_for(int dim, int npts, int sign) {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<PlanSlot>> cache;
  auto key = std::make_tuple(dim, npts, sign);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<PlanSlot>(dim, npts, sign)).first;
  return *it->second;
}

// Centered lattices x_j = -L + j h, xi_k = (k - N/2) pi/L turn the plain DFT
// into the integral convention via e^{-i x_j xi_k} =
// (-1)^j (-1)^k (-1)^{N/2} e^{-2 pi i jk/N} per axis.
void checkerboard(Field& f) {
  const int n = f.grid.points_per_axis;
  if (f.grid.dim == 1) {
    for (int i = 1; i < n; i += 2) f.v[i] = -f.v[i];
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = (i & 1) ? 0 : 1; j < n; j += 2)
        f.v[std::size_t(i) * n + j] = -f.v[std::size_t(i) * n + j];
  }
}

double half_n_sign(const Grid& g) {
  const double s = (g.points_per_axis / 2) % 2 == 0 ? 1.0 : -1.0;
  return g.dim == 1 ? s : 1.0;  // s^2 == 1 for dim 2
}

// sin/cos of b * m^2 / 2 with the argument reduced in extended precision;
// |b| m^2 can reach ~1e10 where double reduction alone would lose the phase.
cplx chirp(long double b_half, long long m) {
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  long double ph = fmodl(b_half * m * m, two_pi);
  return {std::cos(double(ph)), std::sin(double(ph))};
}

cplx unit_phase(long double ph) {
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  long double r = fmodl(ph, two_pi);
  return {std::cos(double(r)), std::sin(double(r))};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// S_j = sum_k c_k e^{i (y0 + j dy)(k - N/2) delta}, j = 0..M-1 (Bluestein).
void chirpz_line(const cplx* c, int N, double delta, double y0, double dy,
                 int M, cplx* out) {
  const long double beta = (long double)dy * delta;
  const std::size_t P = next_pow2(std::size_t(N) + M - 1);

  static thread_local std::map<std::size_t, std::pair<std::vector<cplx>, std::vector<cplx>>> bufs;
  auto& [A, V] = bufs[P];
  A.assign(P, cplx(0.0));
  V.assign(P, cplx(0.0));

  for (int k = 0; k < N; ++k) {
    const cplx b = c[k] * unit_phase((long double)y0 * (k - N / 2) * delta);
    A[k] = b * chirp(beta / 2, k);
  }
  for (int m = 0; m < M; ++m) V[m] = chirp(-beta / 2, m);
  for (int m = 1; m < N; ++m) V[P - m] = chirp(-beta / 2, m);

  auto& fwd = plan_for(1, int(P), FFTW_FORWARD);
  auto& bwd = plan_for(1, int(P), FFTW_BACKWARD);
  std::vector<cplx> Ah(P), Vh(P);
  fwd.execute(A.data(), Ah.data());
  fwd.execute(V.data(), Vh.data());
  for (std::size_t i = 0; i < P; ++i) Ah[i] *= Vh[i] / double(P);
  bwd.execute(Ah.data(), A.data());

  for (int j = 0; j < M; ++j) {
    const cplx Tj = A[j] * chirp(beta / 2, j);
    out[j] = Tj * unit_phase(-(long double)j * dy * (N / 2) * delta);
  }
}

}  // namespace

Field fourier(const Field& u) {
  const Grid& g = u.grid;
  Field tmp = u;
  checkerboard(tmp);
  Field out(g.dual());
  plan_for(g.dim, g.points_per_axis, FFTW_FORWARD).execute(tmp.data(), out.data());
  checkerboard(out);
  const double h = g.spacing();
  const double scale = half_n_sign(g) *
      std::pow(h / std::sqrt(2.0 * M_PI), g.dim);
  kernels::scale(out.data(), scale, out.size());
  return out;
}

Field inverse_fourier(const Field& uhat) {
  const Grid& gd = uhat.grid;
  Field tmp = uhat;
  checkerboard(tmp);
  Field out(gd.dual());
  plan_for(gd.dim, gd.points_per_axis, FFTW_BACKWARD).execute(tmp.data(), out.data());
  checkerboard(out);
  const double dxi = gd.spacing();
  const double scale = half_n_sign(gd) *
      std::pow(dxi / std::sqrt(2.0 * M_PI), gd.dim);
  kernels::scale(out.data(), scale, out.size());
  return out;
}

void for_each_freq_sq(Field& uhat, const std::function<cplx(double)>& m) {
  const Grid& g = uhat.grid;
  const int n = g.points_per_axis;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) uhat.v[i] *= m(g.coord(i) * g.coord(i));
  } else {
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = g.coord(i) * g.coord(i);
    for (int i = 0; i < n; ++i) {
      cplx* row = uhat.data() + std::size_t(i) * n;
      for (int j = 0; j < n; ++j) row[j] *= m(sq[i] + sq[j]);
    }
  }
}

std::vector<cplx> plain_dft(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw config_error("plain_dft: length must be a power of two");
  std::vector<cplx> out(n);
  plan_for(1, int(n), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD)
      .execute(x.data(), out.data());
  return out;
}

cplx point_eval(const Field& u, const double* x) {
  Field uhat = fourier(u);
  const Grid& gd = uhat.grid;
  const int n = gd.points_per_axis;
  const double w = std::pow(gd.spacing() / std::sqrt(2.0 * M_PI), gd.dim);
  cplx s = 0.0;
  if (gd.dim == 1) {
    for (int k = 0; k < n; ++k)
      s += uhat.v[k] * unit_phase((long double)x[0] * gd.coord(k));
  } else {
    for (int i = 0; i < n; ++i) {
      cplx row = 0.0;
      for (int j = 0; j < n; ++j)
        row += uhat.v[std::size_t(i) * n + j] *
               unit_phase((long double)x[1] * gd.coord(j));
      s += row * unit_phase((long double)x[0] * gd.coord(i));
    }
  }
  return s * w;
}

Field resample_scaled(const Field& u, double alpha, const Grid& out_grid) {
  const Grid& g = u.grid;
  if (out_grid.dim != g.dim) throw config_error("resample: dim mismatch");
  Field uhat = fourier(u);
  const Grid gd = uhat.grid;
  const int n = gd.points_per_axis;
  const double delta = g.freq_spacing();
  const double w = std::pow(gd.spacing() / std::sqrt(2.0 * M_PI), g.dim);
  kernels::scale(uhat.data(), w, uhat.size());

  const int m = out_grid.points_per_axis;
  const double y0 = alpha * (-out_grid.half_width);
  const double dy = alpha * out_grid.spacing();

  Field out(out_grid);
  if (g.dim == 1) {
    chirpz_line(uhat.data(), n, delta, y0, dy, m, out.data());
    return out;
  }
  // axis 1 (contiguous) first, then axis 0 on columns
  std::vector<cplx> mid(std::size_t(n) * m);
  for (int i = 0; i < n; ++i)
    chirpz_line(uhat.data() + std::size_t(i) * n, n, delta, y0, dy, m,
                mid.data() + std::size_t(i) * m);
  std::vector<cplx> col(n), res(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) col[i] = mid[std::size_t(i) * m + j];
    chirpz_line(col.data(), n, delta, y0, dy, m, res.data());
    for (int i = 0; i < m; ++i) out.v[std::size_t(i) * m + j] = res[i];
  }
  return out;
}

}  // namespace nls
