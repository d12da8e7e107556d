#include "nls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "nls/fft.hpp"

namespace nls {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_profile(const AngularProfile& p) {
  const std::size_t s = p.samples.size();
  if (s < 8 || (s & (s - 1)) != 0)
    throw config_error("angular profile needs a power-of-two sample count >= 8");
  for (const cplx& z : p.samples)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw config_error("angular profile contains non-finite samples");
}

void check_dim(int d) {
  if (d != 1 && d != 2) throw config_error("dimension must be 1 or 2");
}

// Coefficients at or below this magnitude are treated as quadrature noise,
// not genuine modes.
double active_floor(const CoefficientSpectrum& s) {
  double m = 0.0;
  for (const cplx& c : s.g) m = std::max(m, std::abs(c));
  return 1e-12 * m;
}

}  // namespace

CoefficientSpectrum compute_coefficients(const AngularProfile& p, int d,
                                         int n_max) {
  check_profile(p);
  check_dim(d);
  if (n_max < 1) throw config_error("n_max must be positive");
  const int S = int(p.samples.size());
  if (2 * n_max >= S)
    throw undersampled_error(
        "n_max too close to Nyquist for the profile sample count");

  const std::vector<cplx> bins = plain_dft(p.samples, -1);
  CoefficientSpectrum out;
  out.d = d;
  out.n_max = n_max;
  out.g.resize(2 * n_max + 1);
  double gmax = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    out.g[n + n_max] = bins[std::size_t((n + S) % S)] / double(S);
    gmax = std::max(gmax, std::abs(out.g[n + n_max]));
  }
  // Coefficients below the transform's roundoff resolution are exact zeros
  // of the profile (symmetry-killed modes come out at ~S*eps otherwise, and
  // that noise floor would pollute every downstream mode sum and decay fit).
  for (cplx& c : out.g)
    if (std::abs(c) <= 1e-11 * gmax) c = cplx(0.0);

  // Crude l1 tail certificate: largest coefficient magnitude over the top
  // quarter of the resolved band, times the number of discarded bins.
  double peak = 0.0;
  for (int k = 0; k < S; ++k) {
    const int n = k < S / 2 ? k : k - S;
    if (8 * std::abs(n) >= 3 * S)
      peak = std::max(peak, std::abs(bins[std::size_t(k)]) / double(S));
  }
  out.tail_bound = peak * double(S - (2 * n_max + 1));
  return out;
}

AngularProfile sample_profile(const std::string& profile_id, int samples) {
  if (samples < 8 || (samples & (samples - 1)) != 0)
    throw config_error("sample count must be a power of two >= 8");
  AngularProfile p;
  p.samples.resize(std::size_t(samples));
  for (int j = 0; j < samples; ++j) {
    const double th = 2.0 * kPi * j / samples;
    cplx v;
    if (profile_id == "gauge") {
      v = std::polar(1.0, th);
    } else if (profile_id == "modulus") {
      v = 1.0;
    } else if (profile_id == "resq") {
      const double c = std::cos(th);
      v = 2.0 * c * c;
    } else if (profile_id == "sqrtcos") {
      v = std::sqrt(std::abs(std::cos(th)));
    } else {
      throw config_error("unknown profile id: " + profile_id);
    }
    p.samples[std::size_t(j)] = v;
  }
  return p;
}

cplx evaluate(const NonlinearitySpec& s, cplx z) {
  if (z == cplx(0.0)) return cplx(0.0);
  const double r = std::abs(z);
  const double rp = std::pow(r, s.power());
  if (s.profile_id == "gauge") return std::pow(r, 2.0 / s.d) * z;
  if (s.profile_id == "modulus") return cplx(rp);
  const double th = std::arg(z);
  if (s.profile_id == "resq") {
    const double c = std::cos(th);
    return cplx(rp * 2.0 * c * c);
  }
  if (s.profile_id == "sqrtcos")
    return cplx(rp * std::sqrt(std::abs(std::cos(th))));
  // Custom spectra evaluate through the mode sum F = sum_n g_n F_n.
  cplx acc(0.0);
  for (int n = -s.spectrum.n_max; n <= s.spectrum.n_max; ++n) {
    const cplx gn = s.spectrum.coeff(n);
    if (gn == cplx(0.0)) continue;
    acc += gn * std::polar(1.0, n * th);
  }
  return rp * acc;
}

cplx evaluate_mode(int n, cplx z, int d) {
  check_dim(d);
  if (z == cplx(0.0)) return cplx(0.0);
  // |z|^{1+2/d-n} z^n = |z|^{1+2/d} e^{i n arg z}, stable for all n.
  return std::pow(std::abs(z), 1.0 + 2.0 / d) *
         std::polar(1.0, n * std::arg(z));
}

AngularProfile reconstruct_profile(const CoefficientSpectrum& s, int samples) {
  if (samples < 8 || (samples & (samples - 1)) != 0)
    throw config_error("sample count must be a power of two >= 8");
  if (s.g.empty()) throw config_error("empty coefficient spectrum");
  AngularProfile p;
  p.samples.resize(std::size_t(samples));
  for (int j = 0; j < samples; ++j) {
    const double th = 2.0 * kPi * j / samples;
    cplx acc(0.0);
    for (int n = -s.n_max; n <= s.n_max; ++n) {
      const cplx gn = s.g[std::size_t(n + s.n_max)];
      if (gn == cplx(0.0)) continue;
      acc += gn * std::polar(1.0, n * th);
    }
    p.samples[std::size_t(j)] = acc;
  }
  return p;
}

MuMargin mu_margin(const CoefficientSpectrum& s) {
  MuMargin m;
  const cplx g0 = s.coeff(0);
  double off = 0.0;
  for (int n = -s.n_max; n <= s.n_max; ++n)
    if (n != 0) off += std::abs(s.coeff(n));
  m.mu = g0.real() - off - s.tail_bound;
  m.imag_g0_warn =
      std::abs(g0.imag()) > 1e-8 * std::max(1.0, std::abs(g0.real()));
  return m;
}

DecayFit decay_fit(const CoefficientSpectrum& s) {
  const double floor = active_floor(s);
  std::vector<double> xs, ys;
  for (int n = -s.n_max; n <= s.n_max; ++n) {
    if (std::abs(n) < 2) continue;
    const double a = std::abs(s.coeff(n));
    if (a <= floor) continue;
    xs.push_back(std::log(double(std::abs(n))));
    ys.push_back(std::log(a));
  }
  if (xs.size() < 8)
    throw undersampled_error(
        "decay fit needs at least 8 nonzero coefficients with |n| >= 2");
  const double npts = double(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = npts * sxx - sx * sx;
  if (denom <= 0.0)
    throw undersampled_error("decay fit abscissae are degenerate");
  DecayFit f;
  f.exponent = (npts * sxy - sx * sy) / denom;
  const double intercept = (sy - f.exponent * sx) / npts;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / npts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + f.exponent * xs[i]);
    ss_res += e * e;
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.n_points = int(xs.size());
  return f;
}

NonlinearitySpec make_spec(const std::string& profile_id, int d,
                           int theta_samples, int n_max) {
  check_dim(d);
  if (profile_id == "custom")
    throw config_error("custom spectra are built from coefficients, not a profile id");
  if (profile_id == "resq" && d != 2)
    throw config_error("profile \"resq\" requires d == 2");
  NonlinearitySpec s;
  s.d = d;
  s.profile_id = profile_id;
  s.spectrum = compute_coefficients(sample_profile(profile_id, theta_samples),
                                    d, n_max);
  s.mu = mu_margin(s.spectrum).mu;
  return s;
}

NonlinearitySpec make_custom_spec(const CoefficientSpectrum& s) {
  check_dim(s.d);
  if (s.g.size() != std::size_t(2 * s.n_max + 1))
    throw config_error("coefficient storage does not match n_max");
  NonlinearitySpec out;
  out.d = s.d;
  out.profile_id = "custom";
  out.spectrum = s;
  out.mu = mu_margin(s).mu;
  return out;
}

bool polynomial_equivalent(const NonlinearitySpec& s) {
  // F is a polynomial in (z, conj z) exactly when every active mode n has
  // n == power (mod 2) and |n| <= power; power = 1 + 2/d is 3 (d=1) or 2.
  const int power = s.d == 1 ? 3 : 2;
  const double floor = active_floor(s.spectrum);
  for (int n = -s.spectrum.n_max; n <= s.spectrum.n_max; ++n) {
    if (std::abs(s.spectrum.coeff(n)) <= floor) continue;
    if (std::abs(n) > power) return false;
    if (((power + n) & 1) != 0) return false;
  }
  return true;
}

}  // namespace nls
