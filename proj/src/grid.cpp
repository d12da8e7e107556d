#include "nls/grid.hpp"

#include <cmath>

#include "nls/kernels.hpp"

namespace nls {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int d, double L, int n) : dim(d), half_width(L), points_per_axis(n) {
  if (d != 1 && d != 2) throw config_error("grid: dim must be 1 or 2");
  if (!(L > 0.0)) throw config_error("grid: half_width must be positive");
  if (!power_of_two(n) || n < 8)
    throw config_error("grid: points_per_axis must be a power of two >= 8");
}

double Grid::freq_spacing() const { return M_PI / half_width; }

std::size_t Grid::size() const {
  std::size_t n = points_per_axis;
  return dim == 1 ? n : n * n;
}

Grid Grid::dual() const {
  // N points at spacing pi/L cover [-N pi/(2L), N pi/(2L)).
  return Grid(dim, points_per_axis * M_PI / (2.0 * half_width), points_per_axis);
}

Field make_field(const Grid& g, const std::function<cplx(double)>& f) {
  if (g.dim != 1) throw config_error("make_field: dim 1 rule on dim 2 grid");
  Field out(g);
  for (int i = 0; i < g.points_per_axis; ++i) out.v[i] = f(g.coord(i));
  return out;
}

Field make_field2(const Grid& g, const std::function<cplx(double, double)>& f) {
  if (g.dim != 2) throw config_error("make_field2: dim 2 rule on dim 1 grid");
  Field out(g);
  const int n = g.points_per_axis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.v[std::size_t(i) * n + j] = f(g.coord(i), g.coord(j));
  return out;
}

std::vector<unsigned char> edge_mask(const Grid& g) {
  const int n = g.points_per_axis;
  std::vector<unsigned char> ax(n);
  for (int i = 0; i < n; ++i)
    ax[i] = std::abs(g.coord(i)) >= 0.9 * g.half_width ? 1 : 0;
  if (g.dim == 1) return ax;
  std::vector<unsigned char> m(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[std::size_t(i) * n + j] = ax[i] | ax[j];
  return m;
}

double boundary_fraction(const Field& f) {
  const auto mask = edge_mask(f.grid);
  const auto s = kernels::reduce_sums(f.data(), mask.data(), f.size());
  return s.sumsq > 0.0 ? s.edge_sumsq / s.sumsq : 0.0;
}

}  // namespace nls
