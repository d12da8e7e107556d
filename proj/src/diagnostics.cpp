#include "nls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nls/kernels.hpp"

namespace nls {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> trap_weights(const std::vector<double>& s) {
  std::vector<double> w(s.size(), 0.0);
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    const double half = 0.5 * (s[j + 1] - s[j]);
    w[j] += half;
    w[j + 1] += half;
  }
  return w;
}

void check_window(const SampledWindow& w, double t) {
  if (w.s.size() != w.u.size())
    throw config_error("window times and fields differ in length");
  if (w.s.size() < 16)
    throw undersampled_error("pairing window needs at least 16 nodes");
  for (std::size_t j = 1; j < w.s.size(); ++j) {
    if (!(w.s[j] > w.s[j - 1]))
      throw config_error("window times must be strictly increasing");
    if (!(w.u[j].grid == w.u[0].grid))
      throw config_error("window fields must share one grid");
  }
  if (w.s.front() < 0.99 * t || w.s.front() > 1.01 * t ||
      w.s.back() < 1.98 * t || w.s.back() > 2.02 * t)
    throw config_error("window must cover [t, 2t]");
}

// (U(-s) a, b) = sum_xi e^{i s |xi|^2} a_hat conj(b_hat) dxi^d, given b_hat.
cplx propagated_dot(const Field& a, double s, const Field& bhat) {
  Field ah = fourier(a);
  for_each_freq_sq(ah, [s](double xi2) { return std::polar(1.0, s * xi2); });
  return kernels::reduce_dot(ah.data(), bhat.data(), ah.size()) *
         std::pow(ah.grid.spacing(), ah.grid.dim);
}

Field mode_field(const Field& u, int n, int d) {
  Field p(u.grid);
  const std::size_t m = u.size();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < m; ++k) p.v[k] = evaluate_mode(n, u.v[k], d);
  return p;
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
  // A flat series is perfectly explained by its constant.
  f.r2 = ss_tot > 1e-18 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

double probe_uhat_abs(const ScatteringDatum& dat, double xi) {
  if (dat.closed_form()) {
    double x[2] = {xi, 0.0};
    return std::abs(dat.eval_uhat(x));
  }
  const Grid& g = dat.uhat->grid;
  const int n = g.points_per_axis;
  int k = int(std::lround((xi - g.coord(0)) / g.spacing()));
  k = std::clamp(k, 0, n - 1);
  const std::size_t idx =
      g.dim == 1 ? std::size_t(k) : std::size_t(k) * n + n / 2;
  return std::abs(dat.uhat->v[idx]);
}

}  // namespace

Field profile_frame(const Field& u, double t) {
  if (!(t > 0.0)) throw config_error("profile_frame: t must be positive");
  const Grid gd = u.grid.dual();
  Field w = resample_scaled(u, 2.0 * t, gd);
  const cplx front =
      std::pow(2.0 * t, 0.5 * u.grid.dim) *
      std::polar(1.0, 0.25 * kPi * u.grid.dim);
  const int n = gd.points_per_axis;
  if (gd.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double xi = gd.coord(i);
      w.v[std::size_t(i)] *= front * std::polar(1.0, -t * xi * xi);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double a = gd.coord(i), b = gd.coord(j);
        w.v[std::size_t(i) * n + j] *=
            front * std::polar(1.0, -t * (a * a + b * b));
      }
  }
  return w;
}

ScatteringMetrics scattering_metrics(const Trajectory& traj,
                                     const ScatteringDatum& dat,
                                     const PhaseCorrection& ph) {
  if (traj.termination != Termination::reached_end)
    throw config_error("scattering metrics need a run that reached t_end");
  std::vector<double> ts;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < traj.snap_times.size(); ++i)
    if (traj.snap_times[i] > 0.0) {
      ts.push_back(traj.snap_times[i]);
      ids.push_back(i);
    }
  if (ts.size() < 2)
    throw undersampled_error("need at least two positive-time snapshots");

  ScatteringMetrics m;
  m.times = ts;
  m.lambda_used = ph.constant_lambda ? ph.lambda : 0.0;
  const Grid& g = traj.snapshots[ids[0]].grid;
  const int d = g.dim;
  const double q = 2.0 * (d + 2.0) / d;
  m.l2_distance.resize(ts.size());
  std::vector<double> qpow(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Field diff = eval_profile(dat, ph, ts[i], g);
    const Field& u = traj.snapshots[ids[i]];
    for (std::size_t k = 0; k < diff.size(); ++k)
      diff.v[k] = u.v[k] - diff.v[k];
    m.l2_distance[i] = l2_norm(diff);
    qpow[i] = std::pow(lp_norm(diff, q), q);
  }

  // Finite-horizon tail: backward trapezoid of ||u - V||_q^q over [t, T_end],
  // weighted by t^{d/(2(d+2))}. The last window has zero measure.
  std::vector<double> tail_int(ts.size(), 0.0);
  for (std::size_t j = ts.size() - 1; j-- > 0;)
    tail_int[j] = tail_int[j + 1] +
                  0.5 * (ts[j + 1] - ts[j]) * (qpow[j] + qpow[j + 1]);
  m.tail_strichartz.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    m.tail_strichartz[i] =
        std::pow(ts[i], d / (2.0 * (d + 2.0))) * std::pow(tail_int[i], 1.0 / q);
  return m;
}

LambdaFit lambda_fit(const Trajectory& traj, const ScatteringDatum& dat,
                     const std::vector<double>& probe_xi, double t_fit) {
  std::vector<double> ts;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < traj.snap_times.size(); ++i)
    if (traj.snap_times[i] >= t_fit && traj.snap_times[i] > 0.0) {
      ts.push_back(traj.snap_times[i]);
      ids.push_back(i);
    }
  if (ts.size() < 3)
    throw undersampled_error("lambda fit needs at least 3 snapshots past t_fit");
  if (std::log10(ts.back() / ts.front()) < 1.5)
    throw undersampled_error("lambda fit needs at least 1.5 decades of time");
  if (probe_xi.empty()) throw config_error("no probe frequencies given");

  const Grid gd = traj.snapshots[ids[0]].grid.dual();
  const int n = gd.points_per_axis;
  const int d = gd.dim;

  // Snap probes to the dual lattice and weight them by the datum modulus.
  struct Probe {
    std::size_t idx;
    double xi;
    double weight;  // |u_hat_plus|^{2/d}
  };
  std::vector<Probe> probes;
  double wmax = 0.0;
  for (double xi : probe_xi) {
    int k = int(std::lround((xi - gd.coord(0)) / gd.spacing()));
    k = std::clamp(k, 0, n - 1);
    const double snapped = gd.coord(k);
    const double w = std::pow(probe_uhat_abs(dat, snapped), 2.0 / d);
    const std::size_t idx =
        d == 1 ? std::size_t(k) : std::size_t(k) * n + n / 2;
    probes.push_back({idx, snapped, w});
    wmax = std::max(wmax, w);
  }
  if (wmax <= 0.0)
    throw undersampled_error("datum vanishes at every probe frequency");

  // Unwrapped phase of the profile frame at each probe, regressed on log t.
  std::vector<std::vector<double>> theta(probes.size(),
                                         std::vector<double>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Field w = profile_frame(traj.snapshots[ids[i]], ts[i]);
    for (std::size_t p = 0; p < probes.size(); ++p)
      theta[p][i] = std::arg(w.v[probes[p].idx]);
  }
  std::vector<double> logt(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) logt[i] = std::log(ts[i]);

  LambdaFit fit;
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    fit.probe_xi.push_back(probes[p].xi);
    if (probes[p].weight < 1e-6 * wmax) {
      fit.probe_slope.push_back(0.0);
      continue;
    }
    std::vector<double>& th = theta[p];
    for (std::size_t i = 1; i < th.size(); ++i) {
      const double dth = std::remainder(th[i] - th[i - 1], 2.0 * kPi);
      if (std::abs(dth) > 0.99 * kPi)
        throw undersampled_error(
            "phase increment near the branch cut; sample more densely in time");
      th[i] = th[i - 1] + dth;
    }
    // theta ~ a + b log t + c/t: the c/t column soaks up the free dispersive
    // transient of the frame (arg w gains -(lap u_hat / u_hat)/(4t) + ...)
    // which at small amplitude is comparable to the secular log t drift over
    // any affordable window. b is the reported slope. With fewer than four
    // samples there is no spare degree of freedom for the nuisance column,
    // so fall back to the plain line fit.
    double slope, r2;
    const std::size_t m = ts.size();
    double sbar = 0.0, ebar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sbar += logt[i];
      ebar += 1.0 / ts[i];
      ybar += th[i];
    }
    sbar /= double(m);
    ebar /= double(m);
    ybar /= double(m);
    double css = 0.0, cee = 0.0, cse = 0.0, csy = 0.0, cey = 0.0, cyy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = logt[i] - sbar;
      const double e = 1.0 / ts[i] - ebar;
      const double y = th[i] - ybar;
      css += s * s;
      cee += e * e;
      cse += s * e;
      csy += s * y;
      cey += e * y;
      cyy += y * y;
    }
    const double disc = css * cee - cse * cse;
    if (m >= 4 && disc > 1e-9 * css * cee) {
      slope = (cee * csy - cse * cey) / disc;
      const double cnui = (css * cey - cse * csy) / disc;
      double ss_res = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = (th[i] - ybar) - slope * (logt[i] - sbar) -
                         cnui * (1.0 / ts[i] - ebar);
        ss_res += r * r;
      }
      r2 = cyy > 1e-18 ? 1.0 - ss_res / cyy : 1.0;
    } else {
      const LineFit lf = line_fit(logt, th);
      slope = lf.slope;
      r2 = lf.r2;
    }
    fit.probe_slope.push_back(slope);
    fit.r2_min = std::min(fit.r2_min, r2);
    // Model: slope = -lambda * weight. Least squares over probes.
    num += probes[p].weight * slope;
    den += probes[p].weight * probes[p].weight;
  }
  if (den <= 0.0)
    throw undersampled_error("no usable probes for the lambda fit");
  fit.lambda_hat = -num / den;
  return fit;
}

ScatteringDatum extract_datum(const Trajectory& traj, double lambda) {
  if (traj.snapshots.empty())
    throw config_error("trajectory has no snapshots to extract a datum from");
  const std::size_t a = traj.snapshots.size() - 1;
  const double T = traj.snap_times[a];
  if (!(T > 0.0))
    throw config_error("anchor snapshot time must be positive");
  Field w = profile_frame(traj.snapshots[a], T);
  const double e = 2.0 / w.grid.dim;
  const double lt = std::log(T);
  for (std::size_t k = 0; k < w.size(); ++k)
    w.v[k] *= std::polar(1.0, lambda * std::pow(std::abs(w.v[k]), e) * lt);
  return make_gridded_datum(std::move(w));
}

cplx pairing_key1(const SampledWindow& w, const ScatteringDatum& dat,
                  double t) {
  check_window(w, t);
  const Grid& g = w.u.front().grid;
  const Field Hh = fourier(eval_H(dat, t, g));
  const auto tw = trap_weights(w.s);
  cplx acc(0.0);
  for (std::size_t j = 0; j < w.s.size(); ++j)
    acc += tw[j] *
           propagated_dot(mode_field(w.u[j], 0, g.dim), w.s[j], Hh);
  return cplx(0.0, -1.0) * acc;
}

cplx pairing_key2(const Field& u_at_sigma_t, double sigma_t,
                  const ScatteringDatum& dat, double t, const Grid& g) {
  if (!(u_at_sigma_t.grid == g))
    throw config_error("field grid does not match the pairing grid");
  const Field Hh = fourier(eval_H(dat, t, g));
  return propagated_dot(u_at_sigma_t, sigma_t, Hh);
}

cplx pairing_key3(const SampledWindow& w, const CoefficientSpectrum& spec,
                  const ScatteringDatum& dat, double t) {
  check_window(w, t);
  const Grid& g = w.u.front().grid;
  double gmax = 0.0;
  for (const cplx& c : spec.g) gmax = std::max(gmax, std::abs(c));
  std::vector<std::pair<int, cplx>> modes;
  for (int n = -spec.n_max; n <= spec.n_max; ++n) {
    if (n == 0) continue;
    const cplx gn = spec.coeff(n);
    if (std::abs(gn) > 1e-14 * gmax) modes.emplace_back(n, gn);
  }
  if (modes.empty()) return cplx(0.0);

  const Field Hh = fourier(eval_H(dat, t, g));
  const auto tw = trap_weights(w.s);
  cplx total(0.0);
  for (const auto& [n, gn] : modes) {
    cplx acc(0.0);
    for (std::size_t j = 0; j < w.s.size(); ++j)
      acc += tw[j] *
             propagated_dot(mode_field(w.u[j], n, g.dim), w.s[j], Hh);
    total += gn * acc;
  }
  return total;
}

cplx barab_pairing(const SampledWindow& w, const ScatteringDatum& dat,
                   double t) {
  check_window(w, t);
  const Grid& g = w.u.front().grid;
  const Field uph = datum_uhat(dat, g);
  const auto tw = trap_weights(w.s);
  cplx acc(0.0);
  for (std::size_t j = 0; j < w.s.size(); ++j)
    acc += tw[j] *
           propagated_dot(mode_field(w.u[j], 1, g.dim), w.s[j], uph);
  return acc;
}

std::vector<double> frame_distances(const std::vector<double>& times,
                                    const std::vector<Field>& w_series,
                                    const Field& w_anchor, double anchor_t,
                                    double lambda, int d) {
  if (times.size() != w_series.size())
    throw config_error("times and frames differ in length");
  const double e = 2.0 / d;
  const double la = std::log(anchor_t);
  const double meas = std::pow(w_anchor.grid.spacing(), d);
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dl = la - std::log(times[i]);
    double acc = 0.0;
    const std::size_t m = w_anchor.size();
    for (std::size_t k = 0; k < m; ++k) {
      const cplx a = w_anchor.v[k];
      const cplx model =
          a * std::polar(1.0, lambda * std::pow(std::abs(a), e) * dl);
      acc += std::norm(w_series[i].v[k] - model);
    }
    out[i] = std::sqrt(acc * meas);
  }
  return out;
}

Verdict classify(const Trajectory& traj, const ClassifyConfig& cfg) {
  Verdict v;
  if (traj.termination == Termination::blowup) {
    v.classification = "blowup";
    v.detail = "run terminated by blowup trigger: " + traj.reason;
    return v;
  }
  if (traj.termination == Termination::domain_overflow) {
    v.classification = "inconclusive";
    v.detail = "run left the resolved box: " + traj.reason;
    return v;
  }

  std::vector<double> ts;
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < traj.snap_times.size(); ++i)
    if (traj.snap_times[i] > 0.0) {
      ts.push_back(traj.snap_times[i]);
      ids.push_back(i);
    }
  if (ts.size() < 4) {
    v.classification = "inconclusive";
    v.detail = "too few positive-time snapshots for trend statistics";
    return v;
  }

  std::vector<Field> frames(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    frames[i] = profile_frame(traj.snapshots[ids[i]], ts[i]);
  const double T = ts.back();
  const int d = frames.back().grid.dim;

  try {
    const ScatteringDatum d0 = make_gridded_datum(frames.back());
    const LambdaFit fit = lambda_fit(traj, d0, cfg.probe_xi, cfg.t_fit);
    v.lambda_hat = fit.lambda_hat;
  } catch (const error& err) {
    v.classification = "inconclusive";
    v.detail = std::string("lambda fit unavailable: ") + err.what();
    return v;
  }
  v.ref_l2 = l2_norm(frames.back());
  if (!(v.ref_l2 > 0.0)) {
    v.classification = "inconclusive";
    v.detail = "reference datum is identically zero";
    return v;
  }

  // Stats window: the last decade of snapshots, excluding the anchor itself
  // (its distance is zero by construction of the extracted datum).
  std::vector<std::size_t> win;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (ts[i] >= T / 10.0) win.push_back(i);
  if (win.size() < 3) {
    v.classification = "inconclusive";
    v.detail = "fewer than 3 snapshots in the last decade";
    return v;
  }
  std::vector<double> win_logt;
  for (std::size_t i : win) win_logt.push_back(std::log(ts[i]));

  auto window_stats = [&](double lambda, double* mean_rel, double* slope,
                          double* final_rel) {
    const std::vector<double> dist =
        frame_distances(ts, frames, frames.back(), T, lambda, d);
    std::vector<double> rel;
    for (std::size_t i : win) rel.push_back(dist[i] / v.ref_l2);
    double m = 0.0;
    for (double r : rel) m += r;
    *mean_rel = m / double(rel.size());
    *slope = line_fit(win_logt, rel).slope;
    *final_rel = rel.back();
  };

  double mean_hat = 0.0;
  window_stats(v.lambda_hat, &mean_hat, &v.trend_slope, &v.final_rel_distance);

  // Lambda grid scan for the non-scattering floor; the fitted value joins
  // the grid so the infimum can never miss it.
  v.inf_grid_mean_rel = mean_hat;
  v.inf_grid_trend = v.trend_slope;
  for (int i = 0; i < cfg.lambda_grid_points; ++i) {
    const double lam =
        cfg.lambda_grid_points == 1
            ? 0.0
            : -cfg.lambda_grid_span +
                  2.0 * cfg.lambda_grid_span * i / (cfg.lambda_grid_points - 1);
    double mean = 0.0, slope = 0.0, fin = 0.0;
    window_stats(lam, &mean, &slope, &fin);
    if (mean < v.inf_grid_mean_rel) {
      v.inf_grid_mean_rel = mean;
      v.inf_grid_trend = slope;
    }
  }

  std::ostringstream det;
  det.precision(4);
  det << "lambda_hat=" << v.lambda_hat
      << " final_rel=" << v.final_rel_distance
      << " trend=" << v.trend_slope
      << " inf_grid_mean=" << v.inf_grid_mean_rel
      << " inf_grid_trend=" << v.inf_grid_trend;

  // Slightly positive trend tolerance: a series already at the quadrature
  // floor is flat up to noise.
  const double trend_tol = cfg.trend_tol;
  if (v.final_rel_distance < cfg.theta_s && v.trend_slope <= trend_tol) {
    v.classification = std::abs(v.lambda_hat) < cfg.lambda_free
                           ? "free-scattering"
                           : "modified-scattering";
    v.detail = det.str();
    return v;
  }
  if (v.inf_grid_mean_rel >= cfg.theta_n && v.inf_grid_trend >= -trend_tol) {
    v.classification = "non-scattering";
    v.detail = det.str();
    return v;
  }
  v.classification = "inconclusive";
  v.detail = det.str();
  return v;
}

}  // namespace nls
