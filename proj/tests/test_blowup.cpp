#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "nls/blowup.hpp"

using nls::cplx;
using nls::Field;
using nls::Grid;

namespace {

// Small driven run used by the weak-identity tests: u(0) = eps f on a box
// wide enough that the fat-tailed datum clears the boundary monitor.
nls::Trajectory driven_run(const Grid& g, const nls::NonlinearitySpec& nl,
                           const Field& f, double eps, double t_end,
                           double snap_dt, double dt) {
  nls::SimulationConfig cfg;
  cfg.grid = g;
  cfg.nl = nl;
  cfg.t_start = 0.0;
  cfg.t_end = t_end;
  cfg.fixed_dt = true;
  cfg.dt = dt;
  cfg.boundary_cap = 0.1;
  for (double t = 0.0; t <= t_end + 1e-12; t += snap_dt)
    cfg.snapshot_times.push_back(t);
  Field u0(g);
  for (std::size_t i = 0; i < u0.size(); ++i) u0.v[i] = eps * f.v[i];
  return nls::run(cfg, u0);
}

}  // namespace

TEST_CASE("calibration hits the closed-form normalizing constants") {
  // d = 1: \int e^{1 - sqrt(1 + a^2 x^2)} dx = (2e/a) K_1(1), so a = 2e K_1(1).
  const auto tf1 = nls::calibrate_test_functions(1);
  const double a1 = 2.0 * std::exp(1.0) * std::cyl_bessel_k(1.0, 1.0);
  REQUIRE(tf1.a == doctest::Approx(a1).epsilon(1e-8));
  // d = 2: the radial integral is elementary and gives a = 2 sqrt(pi).
  const auto tf2 = nls::calibrate_test_functions(2);
  REQUIRE(tf2.a == doctest::Approx(2.0 * std::sqrt(3.14159265358979323846))
                       .epsilon(1e-8));
}

TEST_CASE("sup |lap phi| / phi sits at the origin") {
  for (int d : {1, 2}) {
    const auto tf = nls::calibrate_test_functions(d);
    REQUIRE(tf.M == doctest::Approx(d * tf.a * tf.a).epsilon(1e-3));
    REQUIRE(tf.N == doctest::Approx(tf.theta).epsilon(1e-12));
  }
}

TEST_CASE("eta is the clipped power profile") {
  const auto tf = nls::calibrate_test_functions(1, 2.0);
  REQUIRE(nls::eta_of(tf, 0.3) == doctest::Approx(0.49).epsilon(1e-14));
  REQUIRE(nls::eta_prime_of(tf, 0.3) == doctest::Approx(-1.4).epsilon(1e-14));
  REQUIRE(nls::eta_of(tf, 1.2) == 0.0);
  REQUIRE(nls::eta_prime_of(tf, 1.2) == 0.0);
  REQUIRE(nls::eta_of(tf, 0.0) == 1.0);
}

TEST_CASE("theta below the admissible floor is rejected") {
  REQUIRE_THROWS_AS(nls::calibrate_test_functions(1, 1.4), nls::config_error);
  REQUIRE_THROWS_AS(nls::calibrate_test_functions(2, 1.9), nls::config_error);
  REQUIRE_THROWS_AS(nls::calibrate_test_functions(3, 3.0), nls::config_error);
}

TEST_CASE("closed-form laplacian of phi matches finite differences") {
  const double h = 1e-4;
  for (int d : {1, 2}) {
    const auto tf = nls::calibrate_test_functions(d);
    const double r = 0.7;
    const double second = (nls::phi_of(tf, r + h) - 2.0 * nls::phi_of(tf, r) +
                           nls::phi_of(tf, r - h)) /
                          (h * h);
    const double first =
        (nls::phi_of(tf, r + h) - nls::phi_of(tf, r - h)) / (2.0 * h);
    const double want = second + (d - 1) * first / r;
    REQUIRE(nls::lap_phi_of(tf, r) == doctest::Approx(want).epsilon(1e-4));
    // At the origin the closed form reduces to -d a^2 (phi(0) = 1).
    REQUIRE(nls::lap_phi_of(tf, 0.0) ==
            doctest::Approx(-double(d) * tf.a * tf.a).epsilon(1e-12));
  }
}

TEST_CASE("blowup datum satisfies its defining lower bound on the grid") {
  const Grid g(1, 32.0, 512);
  const auto dat = nls::make_blowup_datum(g, 0.5, 1.0);
  REQUIRE(dat.f.grid == g);
  for (int i = 0; i < g.points_per_axis; ++i) {
    const double r = std::abs(g.coord(i));
    const cplx z = dat.f.v[std::size_t(i)];
    REQUIRE(z.real() == 0.0);
    REQUIRE(-z.imag() >= 0.0);
    if (r > 1.0)
      REQUIRE(-z.imag() * std::pow(r, 0.5) >= 1.0 - 1e-9);
  }
  // Closed form at the origin: -i 2^{k/2} R0^{-k/2}.
  const cplx at0 = dat.f.v[std::size_t(g.points_per_axis / 2)];
  REQUIRE(at0.imag() == doctest::Approx(-std::pow(2.0, 0.25)).epsilon(1e-14));
  REQUIRE_THROWS_AS(nls::make_blowup_datum(g, 1.5, 1.0), nls::config_error);
  REQUIRE_THROWS_AS(nls::make_blowup_datum(g, 0.0, 1.0), nls::config_error);
}

TEST_CASE("weak identity residual shrinks under refinement") {
  const Grid g(1, 32.0, 256);
  const auto nl = nls::make_spec("modulus", 1);
  const auto tf = nls::calibrate_test_functions(1);
  const auto dat = nls::make_blowup_datum(g, 0.5, 1.0);
  const double eps = 0.3, R = 2.0;
  const auto tr1 = driven_run(g, nl, dat.f, eps, R * R, 0.05, 0.025);
  REQUIRE(tr1.termination == nls::Termination::reached_end);
  const double r1 = std::abs(nls::weak_residual(tr1, nl, tf, R, eps, dat.f));
  const auto tr2 = driven_run(g, nl, dat.f, eps, R * R, 0.025, 0.0125);
  const double r2 = std::abs(nls::weak_residual(tr2, nl, tf, R, eps, dat.f));
  REQUIRE(r1 < 0.05);
  REQUIRE(r2 < r1 / 2.5);
}

TEST_CASE("mode functionals are dominated by the modulus functional") {
  const Grid g(2, 16.0, 64);
  const auto nl = nls::make_spec("resq", 2);
  const auto dat = nls::make_blowup_datum(g, 1.0, 1.0);
  const auto tf = nls::calibrate_test_functions(2);
  const auto tr = driven_run(g, nl, dat.f, 0.3, 1.0, 0.05, 0.0125);
  REQUIRE(tr.termination == nls::Termination::reached_end);
  const auto fn = nls::functionals(tr, nl, tf, 1.0, dat.f);
  REQUIRE(fn.I0 >= 0.0);
  REQUIRE(fn.I.count(0) == 1);
  REQUIRE(fn.I.count(2) == 1);
  REQUIRE(fn.I.count(-2) == 1);
  for (const auto& [n, v] : fn.I)
    REQUIRE(std::abs(v) <= fn.I0 * (1.0 + 1e-12) + 1e-15);
  // J pairs the datum against phi_R; -i times a positive profile.
  REQUIRE(fn.J.imag() < 0.0);
  REQUIRE(std::abs(fn.J.real()) < 1e-12 * std::abs(fn.J.imag()));
}

TEST_CASE("rigidity inequality holds with quadrature slack") {
  const Grid g(1, 32.0, 256);
  const auto nl = nls::make_spec("modulus", 1);
  const auto tf = nls::calibrate_test_functions(1);
  const auto dat = nls::make_blowup_datum(g, 0.5, 1.0);
  const double eps = 0.3, R = 2.0;
  const auto tr = driven_run(g, nl, dat.f, eps, R * R, 0.05, 0.025);
  const double res = std::abs(nls::weak_residual(tr, nl, tf, R, eps, dat.f));
  const auto rep = nls::lemma51_check(tr, nl, tf, R, eps, dat.f, 4.0 * res);
  REQUIRE(rep.mu == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.C1 == doctest::Approx(tf.M + tf.N).epsilon(1e-12));
  REQUIRE(rep.s_star == doctest::Approx(rep.s_star_golden).epsilon(1e-6));
  const double gamma = 1.0 / 3.0;
  REQUIRE(rep.C_star == doctest::Approx(rep.C1 * std::pow(rep.s_star, gamma) -
                                        rep.mu * rep.s_star)
                            .epsilon(1e-10));
  REQUIRE(rep.lhs > 0.0);
  REQUIRE(rep.bound_ok);

  // A sign-indefinite spectrum has no margin and is rejected up front.
  REQUIRE_THROWS_AS(
      nls::lemma51_check(tr, nls::make_spec("gauge", 1), tf, R, eps, dat.f),
      nls::config_error);
}

TEST_CASE("sweep orders detection times and labels the regime") {
  nls::SweepConfig cfg;
  cfg.grid = Grid(1, 32.0, 256);
  cfg.nl = nls::make_spec("modulus", 1);
  cfg.k = 0.5;
  cfg.R0 = 1.0;
  cfg.eps_list = {1.0, 1.4, 2.0, 2.8, 5.0, 10.5};
  cfg.t_max = 50.0;
  cfg.dt_cap_c = 0.05;
  cfg.boundary_cap = 0.05;
  cfg.blowup_linf = 1e6;
  cfg.blowup_mass_factor = 2.0;  // toy detection threshold, not the physics
  const auto res = nls::sweep(cfg);
  REQUIRE(res.points.size() == 6);
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const auto& p = res.points[i];
    REQUIRE(p.trigger == "mass");
    REQUIRE_FALSE(p.excluded);
    REQUIRE(p.t_detected > 0.0);
    if (i > 0) REQUIRE(p.t_detected < res.points[i - 1].t_detected);
  }
  REQUIRE(res.fit.regime == "k<d");
  REQUIRE(res.fit.target == doctest::Approx(-4.0).epsilon(1e-12));
  REQUIRE(res.fit.slope_or_rate < 0.0);
  REQUIRE(res.fit.r_squared <= 1.0 + 1e-12);
}

TEST_CASE("sweep with no detections cannot be fitted") {
  nls::SweepConfig cfg;
  cfg.grid = Grid(1, 32.0, 256);
  cfg.nl = nls::make_spec("gauge", 1);  // isometric flow, nothing triggers
  cfg.k = 0.5;
  cfg.eps_list = {0.05, 0.07, 0.1, 0.15, 0.25, 0.52};
  cfg.t_max = 2.0;
  cfg.boundary_cap = 0.05;
  REQUIRE_THROWS_AS(nls::sweep(cfg), nls::undersampled_error);
}

TEST_CASE("sweep validates the epsilon ladder") {
  nls::SweepConfig cfg;
  cfg.grid = Grid(1, 32.0, 256);
  cfg.nl = nls::make_spec("modulus", 1);
  cfg.eps_list = {1.0, 1.2, 1.5, 2.0};  // too few
  REQUIRE_THROWS_AS(nls::sweep(cfg), nls::config_error);
  cfg.eps_list = {1.0, 1.2, 1.5, 2.0, 2.5, 3.0};  // too narrow
  REQUIRE_THROWS_AS(nls::sweep(cfg), nls::config_error);
}
