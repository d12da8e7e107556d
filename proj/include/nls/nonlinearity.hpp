#pragma once

#include <string>
#include <vector>

#include "nls/grid.hpp"

namespace nls {

// Nonlinearities F homogeneous of degree 1 + 2/d, F(lambda z) =
// lambda^{1+2/d} F(z) for lambda > 0, determined by the boundary profile
// g(theta) = F(e^{i theta}) through F(z) = |z|^{1+2/d} g(arg z). The profile
// splits into angular modes g_n, F = sum_n g_n F_n with
// F_n(z) = |z|^{1+2/d-n} z^n.

// Samples of g on the uniform grid theta_j = 2 pi j / S, S a power of two.
struct AngularProfile {
  std::vector<cplx> samples;
};

struct CoefficientSpectrum {
  int d = 1;
  int n_max = 0;
  std::vector<cplx> g;  // g[n + n_max] for n in [-n_max, n_max]
  double tail_bound = 0.0;

  cplx coeff(int n) const {
    return (n < -n_max || n > n_max) ? cplx(0.0) : g[n + n_max];
  }
};

struct NonlinearitySpec {
  int d = 1;
  std::string profile_id;  // gauge | modulus | resq | sqrtcos | custom
  CoefficientSpectrum spectrum;
  double mu = 0.0;  // Re g_0 - sum_{n != 0} |g_n|

  double power() const { return 1.0 + 2.0 / d; }
};

// g_n = (2 pi)^{-1} \int_0^{2 pi} g(theta) e^{-i n theta} dtheta by DFT
// quadrature (exact for band-limited g). Requires n_max < S/2. tail_bound is
// a crude truncation certificate: max |g_n| over the top quarter of
// frequencies times the number of discarded bins.
CoefficientSpectrum compute_coefficients(const AngularProfile& p, int d,
                                         int n_max);

AngularProfile sample_profile(const std::string& profile_id, int samples);

// F(z); closed form for the named profiles, mode sum for "custom".
cplx evaluate(const NonlinearitySpec& s, cplx z);

// F_n(z) = |z|^{1+2/d-n} z^n, computed as |z|^{1+2/d} e^{i n arg z}; 0 at 0.
cplx evaluate_mode(int n, cplx z, int d);

// g(theta_j) = sum_n g_n e^{i n theta_j} on a uniform grid of `samples`.
AngularProfile reconstruct_profile(const CoefficientSpectrum& s, int samples);

struct MuMargin {
  double mu = 0.0;          // Re g_0 - sum_{n != 0}|g_n| - tail_bound
  bool imag_g0_warn = false;
};
MuMargin mu_margin(const CoefficientSpectrum& s);

struct DecayFit {
  double exponent = 0.0;  // slope of log|g_n| vs log|n|
  double r2 = 0.0;
  int n_points = 0;
};
// Least squares over coefficients with |n| >= 2 above a relative floor;
// undersampled_error if fewer than 8 qualify.
DecayFit decay_fit(const CoefficientSpectrum& s);

// Named spec with spectrum, mu and closed-form evaluation wired up.
// theta_samples/n_max default to 4096/64.
NonlinearitySpec make_spec(const std::string& profile_id, int d,
                           int theta_samples = 4096, int n_max = 64);
NonlinearitySpec make_custom_spec(const CoefficientSpectrum& s);

// True when every active mode satisfies 1+2/d-n = even >= 0, i.e. F is a
// polynomial in (z, conj z); drives the dealiasing default.
bool polynomial_equivalent(const NonlinearitySpec& s);

}  // namespace nls
