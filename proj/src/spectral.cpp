#include "nls/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nls/kernels.hpp"

namespace nls {

Field free_propagate(const Field& u, double t) {
  Field uhat = fourier(u);
  for_each_freq_sq(uhat, [t](double xi2) {
    return std::polar(1.0, -t * xi2);
  });
  return inverse_fourier(uhat);
}

Field apply_M(const Field& u, double t) {
  if (t == 0.0) throw config_error("apply_M: t must be nonzero");
  const Grid& g = u.grid;
  const int n = g.points_per_axis;
  Field out = u;
  const double q = 1.0 / (4.0 * t);
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = g.coord(i);
      out.v[i] *= std::polar(1.0, q * x * x);
    }
  } else {
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = g.coord(i) * g.coord(i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.v[std::size_t(i) * n + j] *= std::polar(1.0, q * (sq[i] + sq[j]));
  }
  return out;
}

Field apply_D(const Field& u, double t, std::optional<Grid> out, double cap,
              Extension ext) {
  if (t == 0.0) throw config_error("apply_D: t must be nonzero");
  const Grid dst = out.value_or(u.grid);
  const double alpha = 1.0 / (2.0 * t);
  const double shw = u.grid.half_width;

  // Sampling beyond the source box wraps the periodic interpolant; only
  // meaningful when the wrapped-in tail carries no mass. Zero extension
  // declares those samples to vanish instead, so it needs no gate.
  if (ext == Extension::periodic && std::abs(alpha) * dst.half_width > shw) {
    const double bf = boundary_fraction(u);
    if (bf > cap) {
      std::ostringstream msg;
      msg << "apply_D: rescaled sampling leaves the source box and boundary "
             "mass fraction " << bf << " exceeds cap " << cap;
      throw domain_overflow_error(msg.str());
    }
  }

  // A sample point y is inside the (half-open, periodically identified)
  // source box when -hw <= y < hw; zero extension blanks the rest.
  auto outside = [&](double y) { return y < -shw || y >= shw; };

  Field res = [&] {
    // Lattice-to-lattice fast path: x_j / (2t) lands on the source lattice
    // exactly when alpha is an integer (then j' = alpha j + (1-alpha) N/2).
    const double ar = std::round(alpha);
    if (dst == u.grid && ar == alpha && ar != 0.0) {
      const long long ai = (long long)ar;
      const int n = dst.points_per_axis;
      Field r(dst);
      auto src_index = [&](int j) {
        const long long jp = ai * j + (1 - ai) * (n / 2);
        if (ext == Extension::zero && (jp < 0 || jp >= n)) return -1;
        return int(((jp % n) + n) % n);
      };
      if (dst.dim == 1) {
        for (int j = 0; j < n; ++j) {
          const int s = src_index(j);
          r.v[std::size_t(j)] = s < 0 ? cplx(0.0) : u.v[std::size_t(s)];
        }
      } else {
        for (int i = 0; i < n; ++i) {
          const int si = src_index(i);
          for (int j = 0; j < n; ++j) {
            const int sj = src_index(j);
            r.v[std::size_t(i) * n + j] =
                (si < 0 || sj < 0) ? cplx(0.0)
                                   : u.v[std::size_t(si) * n + sj];
          }
        }
      }
      return r;
    }
    Field r = resample_scaled(u, alpha, dst);
    if (ext == Extension::zero) {
      const int n = dst.points_per_axis;
      if (dst.dim == 1) {
        for (int j = 0; j < n; ++j)
          if (outside(alpha * dst.coord(j))) r.v[std::size_t(j)] = 0.0;
      } else {
        for (int i = 0; i < n; ++i) {
          const bool oi = outside(alpha * dst.coord(i));
          for (int j = 0; j < n; ++j)
            if (oi || outside(alpha * dst.coord(j)))
              r.v[std::size_t(i) * n + j] = 0.0;
        }
      }
    }
    return r;
  }();

  const cplx pref = std::pow(cplx(2.0 * t, 0.0), -0.5 * u.grid.dim);
  kernels::scale(res.data(), pref, res.size());
  return res;
}

double l2_norm(const Field& u) {
  const auto s = kernels::reduce_sums(u.data(), nullptr, u.size());
  return std::sqrt(s.sumsq * std::pow(u.grid.spacing(), u.grid.dim));
}

double lp_norm(const Field& u, double p) {
  if (std::isinf(p)) {
    return kernels::reduce_sums(u.data(), nullptr, u.size()).maxabs;
  }
  const double s = kernels::reduce_pow(u.data(), p, u.size());
  return std::pow(s * std::pow(u.grid.spacing(), u.grid.dim), 1.0 / p);
}

NormReport norms(const Field& u, const std::vector<double>& ps,
                 const std::vector<std::pair<double, double>>& sobolev) {
  NormReport r;
  const auto s = kernels::reduce_sums(u.data(), nullptr, u.size());
  r.l2 = std::sqrt(s.sumsq * std::pow(u.grid.spacing(), u.grid.dim));
  r.linf = s.maxabs;
  r.boundary_fraction = boundary_fraction(u);
  for (double p : ps) r.lp[p] = lp_norm(u, p);
  for (auto [m, sw] : sobolev) {
    // <x>^s then <xi>^m then L2
    Field wx = u;
    const Grid& g = u.grid;
    const int n = g.points_per_axis;
    if (g.dim == 1) {
      for (int i = 0; i < n; ++i) {
        const double x = g.coord(i);
        wx.v[i] *= std::pow(1.0 + x * x, 0.5 * sw);
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x0 = g.coord(i), x1 = g.coord(j);
          wx.v[std::size_t(i) * n + j] *=
              std::pow(1.0 + x0 * x0 + x1 * x1, 0.5 * sw);
        }
    }
    Field what = fourier(wx);
    for_each_freq_sq(what, [m](double xi2) {
      return cplx(std::pow(1.0 + xi2, 0.5 * m), 0.0);
    });
    r.h_ms[{m, sw}] = l2_norm(what);
  }
  return r;
}

double strichartz_norm(const std::vector<double>& times,
                       const std::vector<Field>& fields) {
  if (times.size() != fields.size())
    throw config_error("strichartz_norm: times/fields length mismatch");
  if (times.size() < 4)
    throw undersampled_error("strichartz_norm: needs >= 4 time samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw config_error("strichartz_norm: times must be strictly increasing");
  const int d = fields.front().grid.dim;
  const double q = 2.0 * (d + 2) / d;
  std::vector<double> integrand(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    integrand[i] = std::pow(lp_norm(fields[i], q), q);
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (integrand[i] + integrand[i - 1]) * (times[i] - times[i - 1]);
  return std::pow(acc, 1.0 / q);
}

void dump_field(const Field& u, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("dump_field: cannot open " + path);
  char head[160];
  std::snprintf(head, sizeof head,
                "{\"d\":%d,\"half_width\":%.17g,\"points_per_axis\":%d}\n",
                u.grid.dim, u.grid.half_width, u.grid.points_per_axis);
  f << head;
  // Little-endian float64 pairs; std::complex<double> is layout-compatible.
  f.write(reinterpret_cast<const char*>(u.data()),
          std::streamsize(u.size() * sizeof(cplx)));
  if (!f) throw error("dump_field: write failed for " + path);
}

Field load_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error("load_field: cannot open " + path);
  std::string head;
  std::getline(f, head);
  int d = 0, n = 0;
  double L = 0.0;
  if (std::sscanf(head.c_str(),
                  "{\"d\":%d,\"half_width\":%lg,\"points_per_axis\":%d}", &d,
                  &L, &n) != 3)
    throw error("load_field: bad header in " + path);
  Field u{Grid(d, L, n)};
  f.read(reinterpret_cast<char*>(u.data()),
         std::streamsize(u.size() * sizeof(cplx)));
  if (std::size_t(f.gcount()) != u.size() * sizeof(cplx))
    throw error("load_field: truncated payload in " + path);
  return u;
}

}  // namespace nls
