#include "nls/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "nls/kernels.hpp"

namespace nls {

namespace {

// Closed-form dispatch for the pointwise ODE right-hand side; string
// comparison is hoisted out of the per-point loops.
enum class Form { zero, gauge, modulus, resq, sqrtcos, custom };

struct PointwiseF {
  Form form = Form::custom;
  int d = 1;
  double g1 = 0.0;                          // gauge fast path coefficient
  double ell1 = 0.0;                        // sum |g_n| + tail, rate bound
  std::vector<std::pair<int, cplx>> modes;  // active custom modes

  cplx operator()(cplx w) const {
    if (w == cplx(0.0)) return cplx(0.0);
    const double r = std::abs(w);
    switch (form) {
      case Form::zero:
        return cplx(0.0);
      case Form::gauge:
        return g1 * std::pow(r, 2.0 / d) * w;
      case Form::modulus:
        return cplx(std::pow(r, 1.0 + 2.0 / d));
      case Form::resq: {
        const double c = std::cos(std::arg(w));
        return cplx(2.0 * c * c * std::pow(r, 1.0 + 2.0 / d));
      }
      case Form::sqrtcos:
        return cplx(std::sqrt(std::abs(std::cos(std::arg(w)))) *
                    std::pow(r, 1.0 + 2.0 / d));
      case Form::custom: {
        const double th = std::arg(w);
        cplx acc(0.0);
        for (const auto& [n, gn] : modes) acc += gn * std::polar(1.0, n * th);
        return std::pow(r, 1.0 + 2.0 / d) * acc;
      }
    }
    return cplx(0.0);
  }
};

PointwiseF make_pointwise(const NonlinearitySpec& nl) {
  PointwiseF f;
  f.d = nl.d;
  double ell1 = nl.spectrum.tail_bound;
  double gmax = 0.0;
  for (const cplx& c : nl.spectrum.g) {
    ell1 += std::abs(c);
    gmax = std::max(gmax, std::abs(c));
  }
  f.ell1 = ell1;
  if (nl.profile_id == "gauge") {
    f.form = Form::gauge;
    f.g1 = nl.spectrum.coeff(1).real();
    return f;
  }
  if (nl.profile_id == "modulus") {
    f.form = Form::modulus;
    return f;
  }
  if (nl.profile_id == "resq") {
    f.form = Form::resq;
    return f;
  }
  if (nl.profile_id == "sqrtcos") {
    f.form = Form::sqrtcos;
    return f;
  }
  if (gmax == 0.0) {
    f.form = Form::zero;
    return f;
  }
  // Custom: keep only genuine modes, and collapse to the exact-rotation form
  // when the spectrum is single-mode n=1 with a real coefficient.
  const double floor = 1e-14 * gmax;
  for (int n = -nl.spectrum.n_max; n <= nl.spectrum.n_max; ++n) {
    const cplx gn = nl.spectrum.coeff(n);
    if (std::abs(gn) > floor) f.modes.emplace_back(n, gn);
  }
  if (f.modes.empty()) {
    f.form = Form::zero;
  } else if (f.modes.size() == 1 && f.modes[0].first == 1 &&
             std::abs(f.modes[0].second.imag()) <=
                 1e-14 * std::abs(f.modes[0].second.real())) {
    f.form = Form::gauge;
    f.g1 = f.modes[0].second.real();
  } else {
    f.form = Form::custom;
  }
  return f;
}

// Deterministic sum independent of thread count: fixed 256-chunk partials
// combined in index order, matching the kernels module contract.
double chunked_sum(const std::vector<double>& a) {
  constexpr std::size_t kChunks = 256;
  const std::size_t n = a.size();
  double partial[kChunks] = {0.0};
  const std::size_t step = (n + kChunks - 1) / kChunks;
  for (std::size_t c = 0; c < kChunks; ++c) {
    const std::size_t lo = c * step, hi = std::min(n, lo + step);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < kChunks; ++c) total += partial[c];
  return total;
}

// 2/3-rule mask: zero every mode with index magnitude above N/3 on any axis.
void dealias_mask(Field& u) {
  Field uhat = fourier(u);
  const int n = u.grid.points_per_axis;
  const int keep = n / 3;
  auto cut = [&](int idx) { return std::abs(idx - n / 2) > keep; };
  if (u.grid.dim == 1) {
    for (int i = 0; i < n; ++i)
      if (cut(i)) uhat.v[std::size_t(i)] = 0.0;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (cut(i) || cut(j)) uhat.v[std::size_t(i) * n + j] = 0.0;
  }
  u = inverse_fourier(uhat);
}

}  // namespace

double nonlinear_substep(Field& u, double dt, const NonlinearitySpec& nl,
                         unsigned cycle_cap) {
  if (dt == 0.0) return 0.0;
  const PointwiseF F = make_pointwise(nl);
  if (F.form == Form::zero) return 0.0;

  if (F.form == Form::gauge) {
    // Exact rotation: |w| conserved, so the identity quadrature is zero.
    const double e = 2.0 / F.d;
    const double g1 = F.g1;
    const std::size_t n = u.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx w = u.v[k];
      if (w == cplx(0.0)) continue;
      u.v[k] = w * std::polar(1.0, -g1 * std::pow(std::abs(w), e) * dt);
    }
    return 0.0;
  }

  const std::size_t n = u.size();
  std::vector<double> quad(n, 0.0);
  const double e = 2.0 / F.d;
  int capped = 0;

  auto rhs = [&F](cplx w) { return cplx(0.0, -1.0) * F(w); };
  auto rk4 = [&rhs](cplx w, double h) {
    const cplx k1 = rhs(w);
    const cplx k2 = rhs(w + 0.5 * h * k1);
    const cplx k3 = rhs(w + 0.5 * h * k2);
    const cplx k4 = rhs(w + h * k3);
    return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto identity_rate = [&F](cplx w) {
    return 2.0 * std::imag(std::conj(w) * F(w));
  };

#pragma omp parallel for schedule(static) reduction(max : capped)
  for (std::size_t k = 0; k < n; ++k) {
    cplx w = u.v[k];
    if (w == cplx(0.0)) continue;
    double remaining = dt;
    unsigned cycles = 0;
    double qk = 0.0;
    while (remaining > 0.0) {
      if (++cycles > cycle_cap) {
        capped = 1;
        break;
      }
      const double rate = F.ell1 * std::pow(std::abs(w), e);
      double h = rate > 0.0 ? 0.05 / rate : remaining;
      if (h >= remaining) {
        h = remaining;
        remaining = 0.0;
      } else {
        remaining -= h;
      }
      // Two half steps give an accurate midpoint for Simpson quadrature of
      // the mass-identity integrand.
      const cplx wm = rk4(w, 0.5 * h);
      const cplx w1 = rk4(wm, 0.5 * h);
      qk += (h / 6.0) *
            (identity_rate(w) + 4.0 * identity_rate(wm) + identity_rate(w1));
      w = w1;
    }
    u.v[k] = w;
    quad[k] = qk;
  }
  if (capped != 0)
    throw stiffness_error(
        "pointwise substep exceeded its sub-cycle budget; reduce dt");
  return chunked_sum(quad);
}

void step_strang(Field& u, double dt, const NonlinearitySpec& nl,
                 bool dealias) {
  u = free_propagate(u, 0.5 * dt);
  nonlinear_substep(u, dt, nl, SimulationConfig{}.substep_cycle_cap);
  if (dealias) dealias_mask(u);
  u = free_propagate(u, 0.5 * dt);
}

Trajectory run(const SimulationConfig& cfg, const Field& u0) {
  if (!(u0.grid == cfg.grid))
    throw config_error("initial data grid does not match the configured grid");
  if (cfg.nl.d != cfg.grid.dim)
    throw config_error("nonlinearity dimension does not match the grid");
  if (!(cfg.t_end > cfg.t_start))
    throw config_error("t_end must exceed t_start");
  if (cfg.fixed_dt && !(cfg.dt > 0.0))
    throw config_error("fixed-dt mode needs dt > 0");
  if (!cfg.fixed_dt && !(cfg.dt_cap_c > 0.0))
    throw config_error("dt_cap_c must be positive");

  const bool dealias =
      cfg.dealias_set ? cfg.dealias : polynomial_equivalent(cfg.nl);
  const double hd = std::pow(cfg.grid.spacing(), cfg.grid.dim);
  const double e = 2.0 / cfg.grid.dim;

  // Snapshot targets resolved to the nearest realized step time: track the
  // best candidate seen for each target, finalized once time moves past it.
  struct Pending {
    double target;
    double best = -1.0;
    Field field;
  };
  std::vector<Pending> pend;
  for (double ts : cfg.snapshot_times) pend.push_back({ts, -1.0, Field()});
  std::sort(pend.begin(), pend.end(),
            [](const Pending& a, const Pending& b) { return a.target < b.target; });
  Trajectory traj;
  std::size_t pi = 0;
  auto offer = [&](double t, const Field& u, bool last) {
    for (std::size_t i = pi; i < pend.size(); ++i) {
      Pending& p = pend[i];
      const double d = std::abs(t - p.target);
      if (p.best < 0.0 || d < p.best) {
        p.best = d;
        p.field = u;
      }
    }
    while (pi < pend.size() && (last || t >= pend[pi].target)) {
      traj.snap_times.push_back(pend[pi].target);
      traj.snapshots.push_back(std::move(pend[pi].field));
      ++pi;
    }
  };

  Field u = u0;
  double t = cfg.t_start;
  const std::vector<unsigned char> edges = edge_mask(cfg.grid);
  auto sums = kernels::reduce_sums(u.data(), edges.data(), u.size());
  const double mass0 = sums.sumsq * hd;
  auto record = [&](double tt, const kernels::Sums& s) {
    ScalarSample smp;
    smp.t = tt;
    smp.mass = s.sumsq * hd;
    smp.linf = s.maxabs;
    smp.boundary_fraction = s.sumsq > 0.0 ? s.edge_sumsq / s.sumsq : 0.0;
    traj.scalars.push_back(smp);
  };
  record(t, sums);
  offer(t, u, false);

  while (t < cfg.t_end) {
    double dt = cfg.fixed_dt
                    ? cfg.dt
                    : cfg.dt_cap_c / (1.0 + std::pow(sums.maxabs, e));
    dt = std::min(dt, cfg.t_end - t);
    if (!(dt > 0.0) || t + dt == t) {
      traj.termination = Termination::blowup;
      traj.reason = "time step underflow";
      break;
    }

    u = free_propagate(u, 0.5 * dt);
    const double pre = kernels::reduce_sums(u.data(), nullptr, u.size()).sumsq;
    const double quad =
        nonlinear_substep(u, dt, cfg.nl, cfg.substep_cycle_cap);
    const double post = kernels::reduce_sums(u.data(), nullptr, u.size()).sumsq;
    if (post > 0.0) {
      const double resid = std::abs(post - pre - quad) / post;
      traj.max_mass_identity_residual =
          std::max(traj.max_mass_identity_residual, resid);
    }
    if (dealias) dealias_mask(u);
    u = free_propagate(u, 0.5 * dt);

    t += dt;
    ++traj.steps;
    sums = kernels::reduce_sums(u.data(), edges.data(), u.size());
    record(t, sums);
    offer(t, u, false);

    const double mass = sums.sumsq * hd;
    if (!std::isfinite(mass) || !std::isfinite(sums.maxabs)) {
      traj.termination = Termination::blowup;
      traj.reason = "non-finite state";
      break;
    }
    if (mass0 > 0.0 && mass > cfg.blowup_mass_factor * mass0) {
      traj.termination = Termination::blowup;
      traj.reason = "mass growth factor exceeded";
      break;
    }
    if (sums.maxabs > cfg.blowup_linf) {
      traj.termination = Termination::blowup;
      traj.reason = "sup-norm cap exceeded";
      break;
    }
    const double bf = sums.sumsq > 0.0 ? sums.edge_sumsq / sums.sumsq : 0.0;
    if (bf > cfg.boundary_cap) {
      traj.termination = Termination::domain_overflow;
      traj.reason = "boundary mass fraction exceeded cap";
      break;
    }
  }

  traj.end_time = t;
  offer(t, u, true);
  return traj;
}

}  // namespace nls
