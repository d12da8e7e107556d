#include <cmath>
#include <complex>
#include <cstdio>

#include "doctest.h"
#include "nls/fft.hpp"
#include "nls/profiles.hpp"
#include "nls/spectral.hpp"

using nls::cplx;
using nls::Field;
using nls::Grid;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field gaussian1d(const Grid& g, double a) {
  return nls::make_field(
      g, [a](double x) { return cplx(std::exp(-a * x * x), 0.0); });
}

double rel_l2_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.v[i] - b.v[i]);
    den += std::norm(b.v[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("unitary transform: Plancherel and inversion") {
  for (int dim : {1, 2}) {
    const Grid g(dim, 8.0, dim == 1 ? 256 : 64);
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i)
      u.v[i] = cplx(std::sin(0.37 * double(i)), std::cos(1.1 * double(i)));
    const Field uh = nls::fourier(u);
    REQUIRE(uh.grid == g.dual());

    const double h = g.spacing();
    const double dxi = uh.grid.spacing();
    double mx = 0.0, mf = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mx += std::norm(u.v[i]);
    for (std::size_t i = 0; i < uh.size(); ++i) mf += std::norm(uh.v[i]);
    mx *= std::pow(h, dim);
    mf *= std::pow(dxi, dim);
    REQUIRE(mf == doctest::Approx(mx).epsilon(1e-12));

    const Field back = nls::inverse_fourier(uh);
    REQUIRE(back.grid == g);
    REQUIRE(rel_l2_diff(back, u) < 1e-12);
  }
}

TEST_CASE("transform of a Gaussian is the closed-form Gaussian") {
  // F[e^{-x^2/(2 s^2)}](xi) = s e^{-s^2 xi^2 / 2} with the symmetric
  // normalization.
  const Grid g(1, 16.0, 1024);
  const double s = 1.3;
  const Field u = gaussian1d(g, 1.0 / (2.0 * s * s));
  const Field uh = nls::fourier(u);
  for (int i = 0; i < uh.grid.points_per_axis; ++i) {
    const double xi = uh.grid.coord(i);
    const double want = s * std::exp(-s * s * xi * xi / 2.0);
    REQUIRE(std::abs(uh.v[std::size_t(i)] - cplx(want, 0.0)) < 1e-10);
  }
}

TEST_CASE("free propagator: group law and unitarity") {
  const Grid g(1, 16.0, 512);
  Field u = gaussian1d(g, 0.7);
  const double m0 = nls::l2_norm(u);

  Field a = nls::free_propagate(u, 0.3);
  a = nls::free_propagate(a, 1.1);
  const Field b = nls::free_propagate(u, 1.4);
  REQUIRE(rel_l2_diff(a, b) < 1e-12);
  REQUIRE(nls::l2_norm(a) == doctest::Approx(m0).epsilon(1e-12));

  Field back = nls::free_propagate(a, -1.4);
  REQUIRE(rel_l2_diff(back, u) < 1e-12);
}

TEST_CASE("free propagation of a Gaussian matches the closed form") {
  // i u_t + u_xx = 0, u(0) = e^{-x^2}: u(t) = (1+4it)^{-1/2} e^{-x^2/(1+4it)}.
  const Grid g(1, 48.0, 2048);
  const Field u0 = gaussian1d(g, 1.0);
  for (double t : {0.1, 0.5, 2.0}) {
    const Field ut = nls::free_propagate(u0, t);
    const cplx den(1.0, 4.0 * t);
    double worst = 0.0;
    for (int i = 0; i < g.points_per_axis; ++i) {
      const double x = g.coord(i);
      const cplx want = std::exp(-x * x / den) / std::sqrt(den);
      worst = std::max(worst, std::abs(ut.v[std::size_t(i)] - want));
    }
    REQUIRE(worst < 1e-8);
  }
}

TEST_CASE("apply_M is unimodular and invertible") {
  const Grid g(1, 8.0, 256);
  Field u = gaussian1d(g, 0.5);
  const Field m = nls::apply_M(u, 0.7);
  REQUIRE(nls::l2_norm(m) == doctest::Approx(nls::l2_norm(u)).epsilon(1e-14));
  for (std::size_t i = 0; i < u.size(); ++i)
    REQUIRE(std::abs(m.v[i]) == doctest::Approx(std::abs(u.v[i])).epsilon(1e-13));
}

TEST_CASE("apply_D at half-integer time is exact on the lattice") {
  // 2t = 2 maps lattice points to lattice points: D(1)f(x) = 2^{-d/2} f(x/2).
  const Grid g(1, 8.0, 256);
  const Field u = gaussian1d(g, 1.0);
  const Field d = nls::apply_D(u, 1.0);
  for (int i = 0; i < g.points_per_axis; ++i) {
    const double x = g.coord(i);
    const double want = std::exp(-x * x / 4.0) / std::sqrt(2.0);
    REQUIRE(std::abs(d.v[std::size_t(i)] - cplx(want, 0.0)) < 1e-9);
  }
  // L2: ||D(t)f||_2 = ||f||_2 up to the truncated tail.
  REQUIRE(nls::l2_norm(d) == doctest::Approx(nls::l2_norm(u)).epsilon(1e-8));
}

TEST_CASE("apply_D zero extension blanks samples beyond the source box") {
  // exp(-|x|) keeps ~1e-3 of its mass near the box edge, so sampling outside
  // must not wrap: periodic mode refuses, zero mode defines those samples as
  // exactly zero and matches the band-limited interpolant inside.
  const Grid gs(1, 4.0, 64);
  const Field u =
      nls::make_field(gs, [](double x) { return cplx(std::exp(-std::abs(x))); });

  // Chirp-z route: distinct output grid, alpha = 2, samples 2x span +-32.
  const Grid gd(1, 16.0, 128);
  REQUIRE_THROWS_AS(nls::apply_D(u, 0.25, gd), nls::domain_overflow_error);
  const Field z = nls::apply_D(u, 0.25, gd, 1e-8, nls::Extension::zero);
  const double pref = 1.0 / std::sqrt(0.5);
  for (int j = 0; j < gd.points_per_axis; ++j) {
    const double y = 2.0 * gd.coord(j);
    if (y < -gs.half_width || y >= gs.half_width) {
      REQUIRE(std::abs(z.v[std::size_t(j)]) == 0.0);
    } else {
      const cplx want = pref * nls::point_eval(u, &y);
      REQUIRE(std::abs(z.v[std::size_t(j)] - want) < 1e-10);
    }
  }

  // Lattice fast path: same grid, integer alpha; out-of-range source indices
  // read zero instead of wrapping modulo the box.
  const Field zf = nls::apply_D(u, 0.25, std::nullopt, 1e-8,
                                nls::Extension::zero);
  const int n = gs.points_per_axis;
  for (int j = 0; j < n; ++j) {
    const double y = 2.0 * gs.coord(j);
    if (y < -gs.half_width || y >= gs.half_width) {
      REQUIRE(std::abs(zf.v[std::size_t(j)]) == 0.0);
    } else {
      const int src = 2 * j - n / 2;
      REQUIRE(std::abs(zf.v[std::size_t(j)] - pref * u.v[std::size_t(src)]) <
              1e-14);
    }
  }
}

TEST_CASE("resample_scaled at alpha=1 is the identity") {
  const Grid g(1, 4.0, 128);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    u.v[i] = cplx(std::cos(0.9 * double(i)), std::sin(0.2 * double(i)));
  const Field r = nls::resample_scaled(u, 1.0, g);
  REQUIRE(rel_l2_diff(r, u) < 1e-12);
}

TEST_CASE("point_eval reproduces band-limited samples") {
  const Grid g(1, kPi, 64);
  Field u = nls::make_field(g, [](double x) {
    return cplx(std::cos(3.0 * x), std::sin(5.0 * x));
  });
  for (double x : {0.123, -2.5, 1.0}) {
    const cplx want(std::cos(3.0 * x), std::sin(5.0 * x));
    REQUIRE(std::abs(nls::point_eval(u, &x) - want) < 1e-11);
  }
}

TEST_CASE("free flow minus profile: factorization identity, two routes") {
  // || U(t)u+ - V0(t) ||_2 computed directly equals the image of
  // (U(-1/4t) - 1)u+_hat under e^{-i d pi/4} M(t) D(t).
  // The box must hold the spread Gaussian: its periodic tail at |x| = L is
  // ~0.16 exp(-L^2 / (2 + 8t^2)), which pollutes route A if L is too small.
  const Grid g(1, 256.0, 4096);
  const auto dat = nls::make_datum("gauss", 1, 1.0, 1.0);
  const Field uplus = nls::datum_uplus(dat, g);

  for (double t : {10.0, 20.0}) {
    const Field route_a_lhs = nls::free_propagate(uplus, t);
    const Field v0 =
        nls::eval_profile(dat, nls::constant_phase(0.0), t, g);
    Field diff_a = route_a_lhs;
    for (std::size_t i = 0; i < diff_a.size(); ++i) diff_a.v[i] -= v0.v[i];

    Field q = nls::datum_uhat(dat, g);
    const Field q1 = nls::free_propagate(q, -1.0 / (4.0 * t));
    for (std::size_t i = 0; i < q.size(); ++i) q.v[i] = q1.v[i] - q.v[i];
    Field diff_b = nls::apply_D(q, t, g);
    diff_b = nls::apply_M(diff_b, t);
    const cplx front = std::polar(1.0, -kPi / 4.0);
    for (std::size_t i = 0; i < diff_b.size(); ++i) diff_b.v[i] *= front;

    const double na = nls::l2_norm(diff_a);
    const double nb = nls::l2_norm(diff_b);
    REQUIRE(std::abs(na - nb) <= 1e-6 * nb);
    REQUIRE(rel_l2_diff(diff_a, diff_b) < 1e-5);
  }
}

TEST_CASE("strichartz_norm needs enough nodes and scales correctly") {
  const Grid g(1, 16.0, 256);
  const Field u = gaussian1d(g, 1.0);
  std::vector<double> times = {1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<Field> fields(times.size(), u);
  const double s = nls::strichartz_norm(times, fields);
  // Constant-in-time field: norm^q = (t1 - t0) ||u||_q^q.
  const double q = 6.0;
  const double want = std::pow(std::pow(nls::lp_norm(u, q), q), 1.0 / q);
  REQUIRE(s == doctest::Approx(want).epsilon(1e-10));

  std::vector<double> two = {1.0, 2.0};
  std::vector<Field> twof(2, u);
  REQUIRE_THROWS_AS(nls::strichartz_norm(two, twof), nls::undersampled_error);
}

TEST_CASE("norm report flags boundary mass") {
  const Grid g(1, 10.0, 256);
  Field inner = nls::make_field(g, [](double x) {
    return cplx(std::exp(-x * x), 0.0);
  });
  const auto rep_in = nls::norms(inner);
  REQUIRE(rep_in.boundary_fraction < 1e-10);

  Field shifted = nls::make_field(g, [](double x) {
    return cplx(std::exp(-(x - 9.5) * (x - 9.5)), 0.0);
  });
  const auto rep_out = nls::norms(shifted);
  REQUIRE(rep_out.boundary_fraction > 0.5);
}

TEST_CASE("field dump and load round-trip exactly") {
  const Grid g(2, 3.0, 16);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i)
    u.v[i] = cplx(std::sin(double(i)), 1.0 / (1.0 + double(i)));
  const std::string path = "roundtrip_field.f64";
  nls::dump_field(u, path);
  const Field back = nls::load_field(path);
  std::remove(path.c_str());
  REQUIRE(back.grid == g);
  for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(back.v[i] == u.v[i]);
}
