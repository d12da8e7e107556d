#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nls {

using cplx = std::complex<double>;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad or inconsistent user input (CLI maps this to exit code 2).
struct config_error : error {
  using error::error;
};
// A rescaling or evolution pushed significant mass outside the resolved box.
struct domain_overflow_error : error {
  using error::error;
};
// Too few samples/modes for the requested fit or quadrature.
struct undersampled_error : error {
  using error::error;
};
// Pointwise integrator exceeded its sub-cycle budget.
struct stiffness_error : error {
  using error::error;
};

// Uniform periodic grid on [-L, L)^dim with N points per axis, N a power of
// two. The dual (frequency) lattice has spacing pi/L and covers
// [-N pi/(2L), N pi/(2L)) in the same ascending-coordinate storage order, so
// the dual of a grid is again a Grid and dual(dual(g)) == g.
struct Grid {
  int dim = 1;
  double half_width = 1.0;
  int points_per_axis = 8;

  Grid() = default;
  Grid(int d, double L, int n);

  double spacing() const { return 2.0 * half_width / points_per_axis; }
  double freq_spacing() const;
  std::size_t size() const;
  double coord(int i) const { return -half_width + i * spacing(); }
  Grid dual() const;

  bool operator==(const Grid& o) const {
    return dim == o.dim && half_width == o.half_width &&
           points_per_axis == o.points_per_axis;
  }
};

// Complex samples on a Grid, row-major for dim == 2 (axis 0 slowest).
struct Field {
  Grid grid;
  std::vector<cplx> v;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), v(g.size()) {}

  std::size_t size() const { return v.size(); }
  cplx* data() { return v.data(); }
  const cplx* data() const { return v.data(); }
};

// Fill from a pointwise rule f(x) (dim 1) or f(x0, x1) (dim 2).
Field make_field(const Grid& g, const std::function<cplx(double)>& f);
Field make_field2(const Grid& g, const std::function<cplx(double, double)>& f);

// Flags for the points within 10% of the box edge along any axis; shared by
// boundary_fraction and the evolution loop's per-step reductions.
std::vector<unsigned char> edge_mask(const Grid& g);

// Fraction of squared-L2 mass carried by edge-flagged points. Cheap
// indicator that the box has been outgrown.
double boundary_fraction(const Field& f);

}  // namespace nls
