#include <cmath>
#include <complex>
#include <string>

#include "doctest.h"
#include "nls/nonlinearity.hpp"

using nls::cplx;

TEST_CASE("named profiles give exact coefficients") {
  const auto gauge = nls::make_spec("gauge", 1);
  for (int n = -gauge.spectrum.n_max; n <= gauge.spectrum.n_max; ++n) {
    const cplx want = n == 1 ? cplx(1.0) : cplx(0.0);
    REQUIRE(std::abs(gauge.spectrum.coeff(n) - want) < 1e-12);
  }

  const auto mod = nls::make_spec("modulus", 1);
  for (int n = -mod.spectrum.n_max; n <= mod.spectrum.n_max; ++n) {
    const cplx want = n == 0 ? cplx(1.0) : cplx(0.0);
    REQUIRE(std::abs(mod.spectrum.coeff(n) - want) < 1e-12);
  }

  const auto resq = nls::make_spec("resq", 2);
  for (int n = -resq.spectrum.n_max; n <= resq.spectrum.n_max; ++n) {
    cplx want(0.0);
    if (n == 0) want = 1.0;
    if (n == 2 || n == -2) want = 0.5;
    REQUIRE(std::abs(resq.spectrum.coeff(n) - want) < 1e-12);
  }

  REQUIRE_THROWS_AS(nls::make_spec("resq", 1), nls::config_error);
  REQUIRE_THROWS_AS(nls::make_spec("nope", 1), nls::config_error);
}

TEST_CASE("sqrtcos coefficients decay like n^-3/2") {
  const auto s = nls::make_spec("sqrtcos", 1);
  const auto fit = nls::decay_fit(s.spectrum);
  REQUIRE(fit.exponent > -1.7);
  REQUIRE(fit.exponent < -1.3);
  REQUIRE(fit.n_points >= 8);
}

TEST_CASE("decay_fit recovers an exact power law") {
  nls::CoefficientSpectrum s;
  s.d = 1;
  s.n_max = 32;
  s.g.assign(65, cplx(0.0));
  s.g[32] = 1.0;
  for (int n = 1; n <= 32; ++n) {
    s.g[std::size_t(32 + n)] = std::pow(double(n), -2.0);
    s.g[std::size_t(32 - n)] = std::pow(double(n), -2.0);
  }
  const auto fit = nls::decay_fit(s);
  REQUIRE(fit.exponent == doctest::Approx(-2.0).epsilon(1e-6));
  REQUIRE(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evaluate_mode closed-form point") {
  // |1+i| = sqrt2, d = 1: |z|^3 e^{-i arg z} = 2 sqrt2 (1-i)/sqrt2 = 2-2i.
  const cplx v = nls::evaluate_mode(-1, cplx(1.0, 1.0), 1);
  REQUIRE(std::abs(v - cplx(2.0, -2.0)) < 1e-12);
  REQUIRE(nls::evaluate_mode(3, cplx(0.0, 0.0), 1) == cplx(0.0));
}

TEST_CASE("critical homogeneity of evaluate") {
  for (int d : {1, 2}) {
    for (const char* id : {"gauge", "modulus", "sqrtcos"}) {
      const auto s = nls::make_spec(id, d);
      const cplx z(0.3, -0.8);
      for (double lam : {0.5, 2.0, 7.0}) {
        const cplx lhs = nls::evaluate(s, lam * z);
        const cplx rhs = std::pow(lam, 1.0 + 2.0 / d) * nls::evaluate(s, z);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("evaluate matches the mode sum for named profiles") {
  for (const char* id : {"gauge", "modulus", "sqrtcos"}) {
    const auto s = nls::make_spec(id, 1);
    for (double th : {0.0, 0.4, 2.0, 3.9, 5.5}) {
      const cplx z = std::polar(0.9, th);
      cplx sum(0.0);
      for (int n = -s.spectrum.n_max; n <= s.spectrum.n_max; ++n)
        sum += s.spectrum.coeff(n) * nls::evaluate_mode(n, z, 1);
      // sqrtcos is only polynomially band-limited; its tail sets the gap.
      const double tol = std::string(id) == "sqrtcos" ? 1e-2 : 1e-12;
      REQUIRE(std::abs(nls::evaluate(s, z) - sum) <= tol);
    }
  }
}

TEST_CASE("coefficients round-trip through reconstruct_profile") {
  const auto s = nls::make_spec("resq", 2);
  const auto prof = nls::reconstruct_profile(s.spectrum, 256);
  const auto back = nls::compute_coefficients(prof, 2, 8);
  for (int n = -8; n <= 8; ++n)
    REQUIRE(std::abs(back.coeff(n) - s.spectrum.coeff(n)) < 1e-10);
}

TEST_CASE("mu margins of the named profiles") {
  REQUIRE(nls::mu_margin(nls::make_spec("modulus", 1).spectrum).mu ==
          doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(nls::mu_margin(nls::make_spec("gauge", 1).spectrum).mu ==
          doctest::Approx(-1.0).epsilon(1e-10));
  REQUIRE(std::abs(nls::mu_margin(nls::make_spec("resq", 2).spectrum).mu) <
          1e-10);
  // sqrtcos: g_0 = (2/pi) int_0^{pi/2} sqrt(cos) > 0, but the |g_n| tail sum
  // exceeds nothing here; the margin must come out positive.
  REQUIRE(nls::mu_margin(nls::make_spec("sqrtcos", 1).spectrum).mu > 0.0);
}

TEST_CASE("polynomial equivalence classification") {
  REQUIRE(nls::polynomial_equivalent(nls::make_spec("gauge", 1)));
  // d = 2 gauge is |u| u: the power is even but the mode is odd.
  REQUIRE_FALSE(nls::polynomial_equivalent(nls::make_spec("gauge", 2)));
  // d = 2 modulus is |u|^2, a genuine polynomial.
  REQUIRE(nls::polynomial_equivalent(nls::make_spec("modulus", 2)));
  REQUIRE(nls::polynomial_equivalent(nls::make_spec("resq", 2)));
  REQUIRE_FALSE(nls::polynomial_equivalent(nls::make_spec("modulus", 1)));
  REQUIRE_FALSE(nls::polynomial_equivalent(nls::make_spec("sqrtcos", 1)));
}

TEST_CASE("custom spectra validate their sampling") {
  nls::AngularProfile p;
  p.samples.assign(16, cplx(1.0));
  REQUIRE_THROWS_AS(nls::compute_coefficients(p, 1, 8),
                    nls::undersampled_error);
  const auto s = nls::compute_coefficients(p, 1, 7);
  REQUIRE(std::abs(s.coeff(0) - cplx(1.0)) < 1e-12);
}
