#include "nls/blowup.hpp"

#include <algorithm>
#include <cmath>

#include "nls/fft.hpp"

namespace nls {

namespace {

double radius(const Grid& g, std::size_t k) {
  const int n = g.points_per_axis;
  if (g.dim == 1) return std::abs(g.coord(int(k)));
  const double a = g.coord(int(k) / n);
  const double b = g.coord(int(k) % n);
  return std::hypot(a, b);
}

// Simpson quadrature of the radial mass integrand for a given steepness.
double phi_mass(int d, double a) {
  const double r_max = 100.0 / a;
  const int n = 1 << 14;  // even
  const double h = r_max / n;
  auto f = [&](double r) {
    const double phi = std::exp(1.0 - std::sqrt(1.0 + a * a * r * r));
    return d == 1 ? 2.0 * phi : 2.0 * 3.14159265358979323846 * r * phi;
  };
  double acc = f(0.0) + f(r_max);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

struct LineFit {
  double slope = 0.0;
  double r2 = 1.0;
};

LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw undersampled_error("degenerate fit abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (icept + f.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 1e-18 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Shared geometry for the space-time pairings against psi_R: snapshot nodes
// covering [0, R^2] with trapezoid weights, plus phi(x/R) and its scaled
// Laplacian tabulated on the grid. Nodes past the real snapshots (eta and
// eta' both vanish at the right endpoint for theta > 1) carry zero data.
struct PairingGeom {
  std::vector<std::size_t> ids;  // real snapshot indices
  std::vector<double> t;         // node times, possibly one virtual at R^2
  std::vector<double> w;         // trapezoid weights
  std::vector<double> phiR;      // phi(|x|/R)
  std::vector<double> lapR;      // (Delta phi)(|x|/R) / R^2
  double hd = 0.0;
};

PairingGeom make_geom(const Trajectory& traj, const TestFunctions& tf,
                      double R) {
  if (!(R > 0.0)) throw config_error("R must be positive");
  const double R2 = R * R;
  PairingGeom ge;
  for (std::size_t i = 0; i < traj.snap_times.size(); ++i)
    if (traj.snap_times[i] <= R2 * (1.0 + 1e-9)) {
      ge.ids.push_back(i);
      ge.t.push_back(traj.snap_times[i]);
    }
  if (ge.ids.size() < 8)
    throw undersampled_error("need at least 8 snapshots in [0, R^2]");
  if (ge.t.front() > 1e-9 * R2)
    throw config_error("snapshots must start at t = 0");
  if (ge.t.back() < R2 * (1.0 - 1e-9)) ge.t.push_back(R2);
  ge.w.assign(ge.t.size(), 0.0);
  for (std::size_t j = 0; j + 1 < ge.t.size(); ++j) {
    if (!(ge.t[j + 1] > ge.t[j]))
      throw config_error("snapshot times must be strictly increasing");
    const double half = 0.5 * (ge.t[j + 1] - ge.t[j]);
    ge.w[j] += half;
    ge.w[j + 1] += half;
  }

  const Grid& g = traj.snapshots[ge.ids[0]].grid;
  if (g.dim != tf.d) throw config_error("test functions and grid dimension differ");
  const std::size_t m = g.size();
  ge.phiR.resize(m);
  ge.lapR.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double r = radius(g, k) / R;
    ge.phiR[k] = phi_of(tf, r);
    ge.lapR[k] = lap_phi_of(tf, r) / (R * R);
  }
  ge.hd = std::pow(g.spacing(), g.dim);
  return ge;
}

std::vector<std::pair<int, cplx>> active_modes(const CoefficientSpectrum& sp) {
  double gmax = 0.0;
  for (const cplx& c : sp.g) gmax = std::max(gmax, std::abs(c));
  std::vector<std::pair<int, cplx>> out;
  for (int n = -sp.n_max; n <= sp.n_max; ++n) {
    const cplx gn = sp.coeff(n);
    if (n == 0 || std::abs(gn) > 1e-14 * gmax) out.emplace_back(n, gn);
  }
  return out;
}

}  // namespace

double phi_of(const TestFunctions& tf, double r) {
  return std::exp(1.0 - std::sqrt(1.0 + tf.a * tf.a * r * r));
}

double lap_phi_of(const TestFunctions& tf, double r) {
  const double a2 = tf.a * tf.a;
  const double s = std::sqrt(1.0 + a2 * r * r);
  const double phi = std::exp(1.0 - s);
  // phi'' + (d-1)/r phi' with phi = e^{1-s}, s = sqrt(1 + a^2 r^2):
  //   phi'' = (a^4 r^2 / s^3 + a^4 r^2 / s^2 - a^2 / s) phi,
  //   phi'/r = -(a^2 / s) phi.
  return phi * (a2 * a2 * r * r * (1.0 / (s * s * s) + 1.0 / (s * s)) -
                tf.d * a2 / s);
}

double eta_of(const TestFunctions& tf, double t) {
  if (t >= 1.0) return 0.0;
  return std::pow(1.0 - t, tf.theta);
}

double eta_prime_of(const TestFunctions& tf, double t) {
  if (t >= 1.0) return 0.0;
  return -tf.theta * std::pow(1.0 - t, tf.theta - 1.0);
}

TestFunctions calibrate_test_functions(int d, double theta) {
  if (d != 1 && d != 2) throw config_error("dimension must be 1 or 2");
  if (theta < 1.0 + 0.5 * d)
    throw config_error("eta exponent must satisfy theta >= 1 + d/2");
  TestFunctions tf;
  tf.d = d;
  tf.theta = theta;

  // Unit mass: phi_mass is strictly decreasing in a.
  double lo = 0.5, hi = 50.0;
  if (phi_mass(d, lo) < 1.0 || phi_mass(d, hi) > 1.0)
    throw error("calibration bracket failed");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi_mass(d, mid) > 1.0 ? lo : hi) = mid;
  }
  tf.a = 0.5 * (lo + hi);

  // M = sup |Delta phi| / phi, taken on a grid with a spectral Laplacian and
  // restricted to points where phi is not negligible. The sup sits at r = 0,
  // which is a lattice point.
  const Grid g(d, 16.0, d == 1 ? 2048 : 512);
  Field phi(g);
  for (std::size_t k = 0; k < phi.size(); ++k)
    phi.v[k] = phi_of(tf, radius(g, k));
  Field lap = fourier(phi);
  for_each_freq_sq(lap, [](double xi2) { return cplx(-xi2, 0.0); });
  lap = inverse_fourier(lap);
  double m_max = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double p = phi.v[k].real();
    if (p >= 1e-8) m_max = std::max(m_max, std::abs(lap.v[k]) / p);
  }
  tf.M = m_max;

  // N = theta, attained at t = 0 whenever theta >= 1 + d/2; a dense sweep
  // guards the closed form.
  double n_max = theta;
  for (int i = 0; i < 4096; ++i) {
    const double t = i / 4096.0;
    const double e = eta_of(tf, t);
    if (e > 0.0)
      n_max = std::max(n_max, std::abs(eta_prime_of(tf, t)) /
                                  std::pow(e, double(d) / (d + 2.0)));
  }
  tf.N = n_max;
  return tf;
}

BlowupDatum make_blowup_datum(const Grid& g, double k, double R0) {
  if (!(k > 0.0) || k > g.dim)
    throw config_error("decay exponent must satisfy 0 < k <= d");
  if (!(R0 > 0.0)) throw config_error("R0 must be positive");
  BlowupDatum bd;
  bd.d = g.dim;
  bd.k = k;
  bd.R0 = R0;
  const double c = std::pow(2.0, 0.5 * k);
  bd.f = Field(g);
  for (std::size_t i = 0; i < bd.f.size(); ++i) {
    const double r = radius(g, i);
    bd.f.v[i] = cplx(0.0, -c * std::pow(R0 * R0 + r * r, -0.5 * k));
  }
  for (std::size_t i = 0; i < bd.f.size(); ++i) {
    const double r = radius(g, i);
    const double mim = -bd.f.v[i].imag();
    if (r >= R0 && mim < std::pow(r, -k) * (1.0 - 1e-12))
      throw config_error("datum fails the lower bound outside R0");
    if (mim < 0.0) throw config_error("datum has positive imaginary part");
  }
  return bd;
}

cplx weak_residual(const Trajectory& traj, const NonlinearitySpec& nl,
                   const TestFunctions& tf, double R, double eps,
                   const Field& f) {
  const PairingGeom ge = make_geom(traj, tf, R);
  const Grid& g = traj.snapshots[ge.ids[0]].grid;
  if (!(f.grid == g)) throw config_error("datum grid does not match snapshots");
  const double R2 = R * R;
  const auto modes = active_modes(nl.spectrum);

  cplx lhs(0.0);
  std::vector<cplx> rhs_modes(modes.size(), cplx(0.0));
  for (std::size_t j = 0; j < ge.t.size(); ++j) {
    if (j >= ge.ids.size()) break;  // virtual endpoint: integrand vanishes
    const Field& u = traj.snapshots[ge.ids[j]];
    const double ev = eta_of(tf, ge.t[j] / R2);
    const double ep = eta_prime_of(tf, ge.t[j] / R2) / R2;
    cplx acc_l(0.0);
    std::vector<cplx> acc_m(modes.size(), cplx(0.0));
    for (std::size_t x = 0; x < u.size(); ++x) {
      acc_l += u.v[x] * cplx(ev * ge.lapR[x], -ep * ge.phiR[x]);
      const double pw = ev * ge.phiR[x];
      for (std::size_t mi = 0; mi < modes.size(); ++mi)
        acc_m[mi] += evaluate_mode(modes[mi].first, u.v[x], g.dim) * pw;
    }
    lhs += ge.w[j] * acc_l;
    for (std::size_t mi = 0; mi < modes.size(); ++mi)
      rhs_modes[mi] += ge.w[j] * acc_m[mi];
  }
  lhs *= ge.hd;

  cplx rhs(0.0);
  for (std::size_t mi = 0; mi < modes.size(); ++mi)
    rhs += modes[mi].second * rhs_modes[mi] * ge.hd;
  cplx init(0.0);
  for (std::size_t x = 0; x < f.size(); ++x) init += f.v[x] * ge.phiR[x];
  rhs += cplx(0.0, 1.0) * eps * init * ge.hd;
  return lhs - rhs;
}

Functionals functionals(const Trajectory& traj, const NonlinearitySpec& nl,
                        const TestFunctions& tf, double R, const Field& f) {
  const PairingGeom ge = make_geom(traj, tf, R);
  const Grid& g = traj.snapshots[ge.ids[0]].grid;
  if (!(f.grid == g)) throw config_error("datum grid does not match snapshots");
  const double R2 = R * R;
  const auto modes = active_modes(nl.spectrum);

  Functionals fn;
  for (const auto& [n, gn] : modes) fn.I[n] = cplx(0.0);
  for (std::size_t j = 0; j < ge.t.size(); ++j) {
    if (j >= ge.ids.size()) break;
    const Field& u = traj.snapshots[ge.ids[j]];
    const double ev = eta_of(tf, ge.t[j] / R2);
    for (const auto& [n, gn] : modes) {
      cplx acc(0.0);
      for (std::size_t x = 0; x < u.size(); ++x)
        acc += evaluate_mode(n, u.v[x], g.dim) * (ev * ge.phiR[x]);
      fn.I[n] += ge.w[j] * acc * ge.hd;
    }
  }
  cplx j_acc(0.0);
  for (std::size_t x = 0; x < f.size(); ++x) j_acc += f.v[x] * ge.phiR[x];
  fn.J = j_acc * ge.hd;
  fn.I0 = std::max(0.0, fn.I.at(0).real());
  return fn;
}

Lemma51Report lemma51_check(const Trajectory& traj, const NonlinearitySpec& nl,
                            const TestFunctions& tf, double R, double eps,
                            const Field& f, double residual_slack) {
  const MuMargin mm = mu_margin(nl.spectrum);
  if (!(mm.mu > 0.0))
    throw config_error("spectrum is not mu-coercive; the bound does not apply");
  Lemma51Report rep;
  rep.mu = mm.mu;
  rep.C1 = tf.M + tf.N;
  const double gam = tf.d / (tf.d + 2.0);

  rep.s_star = std::pow(rep.C1 * tf.d / (rep.mu * (tf.d + 2.0)),
                        0.5 * (tf.d + 2.0));
  auto val = [&](double s) { return rep.C1 * std::pow(s, gam) - rep.mu * s; };
  rep.C_star = val(rep.s_star);

  // Golden-section cross-check of the maximizer.
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 4.0 * rep.s_star;
    double c = hi - gr * (hi - lo), dpt = lo + gr * (hi - lo);
    double fc = val(c), fd = val(dpt);
    while (hi - lo > 1e-8 * std::max(1.0, hi)) {
      if (fc > fd) {
        hi = dpt;
        dpt = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = val(c);
      } else {
        lo = c;
        c = dpt;
        fc = fd;
        dpt = lo + gr * (hi - lo);
        fd = val(dpt);
      }
    }
    rep.s_star_golden = 0.5 * (lo + hi);
  }

  const Functionals fn = functionals(traj, nl, tf, R, f);
  rep.lhs = -eps * fn.J.imag();
  cplx drift(0.0);
  for (const auto& [n, in] : fn.I) drift += nl.spectrum.coeff(n) * in;
  rep.raw_lhs = -eps * fn.J.imag() + drift.real();
  rep.raw_rhs = rep.C1 * std::pow(fn.I0, gam);
  rep.bound_ok = rep.lhs <= rep.C_star + residual_slack &&
                 rep.raw_lhs <= rep.raw_rhs + residual_slack;
  return rep;
}

SweepResult sweep(const SweepConfig& cfg) {
  if (cfg.eps_list.size() < 6)
    throw config_error("sweep needs at least 6 amplitudes");
  double emin = cfg.eps_list[0], emax = cfg.eps_list[0];
  for (double e : cfg.eps_list) {
    if (!(e > 0.0)) throw config_error("amplitudes must be positive");
    emin = std::min(emin, e);
    emax = std::max(emax, e);
  }
  if (emax < 9.999 * emin)
    throw config_error("amplitudes must span at least a decade");

  const BlowupDatum bd = make_blowup_datum(cfg.grid, cfg.k, cfg.R0);
  SweepResult res;
  for (double eps : cfg.eps_list) {
    SimulationConfig sc;
    sc.grid = cfg.grid;
    sc.nl = cfg.nl;
    sc.t_start = 0.0;
    sc.t_end = cfg.t_max;
    sc.dt_cap_c = cfg.dt_cap_c;
    sc.boundary_cap = cfg.boundary_cap;
    sc.blowup_linf = cfg.blowup_linf;
    sc.blowup_mass_factor = cfg.blowup_mass_factor;
    Field u0 = bd.f;
    for (cplx& z : u0.v) z *= eps;
    const Trajectory tr = run(sc, u0);

    SweepPoint p;
    p.eps = eps;
    p.resolution = cfg.grid.points_per_axis;
    p.t_detected = tr.end_time;
    switch (tr.termination) {
      case Termination::blowup:
        // The adaptive step only collapses when the amplitude runs away, so
        // an underflow is filed with the sup-norm trigger.
        if (tr.reason.find("mass") != std::string::npos)
          p.trigger = "mass";
        else if (tr.reason.find("non-finite") != std::string::npos)
          p.trigger = "nan";
        else
          p.trigger = "linf";
        break;
      case Termination::domain_overflow:
        p.trigger = "none";
        p.excluded = true;
        break;
      case Termination::reached_end:
        p.trigger = "none";
        break;
    }
    res.points.push_back(p);
  }

  const bool subcritical = cfg.k < cfg.grid.dim - 1e-12;
  std::vector<double> xs, ys;
  double env_c = 0.0;
  for (const SweepPoint& p : res.points) {
    if (p.excluded || p.trigger == "none" || !(p.t_detected > 0.0)) continue;
    if (subcritical) {
      xs.push_back(std::log(p.eps));
      ys.push_back(std::log(p.t_detected));
    } else {
      xs.push_back(1.0 / p.eps);
      ys.push_back(std::log(p.t_detected));
      env_c = std::max(env_c, p.eps * std::log(std::max(1.0, p.t_detected)));
    }
  }
  if (xs.size() < 3)
    throw undersampled_error("fewer than 3 detected blowups to fit");
  const LineFit lf = line_fit(xs, ys);
  res.fit.regime = subcritical ? "k<d" : "k=d";
  res.fit.slope_or_rate = lf.slope;
  res.fit.target = subcritical ? -2.0 / (cfg.grid.dim - cfg.k) : 0.0;
  res.fit.r_squared = lf.r2;
  res.fit.envelope_C = subcritical ? 0.0 : env_c;
  return res;
}

}  // namespace nls
