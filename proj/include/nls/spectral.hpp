#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "nls/fft.hpp"
#include "nls/grid.hpp"

namespace nls {

// e^{it Laplacian}: frequency multiplier e^{-i t |xi|^2}. Spatial in/out.
Field free_propagate(const Field& u, double t);

// [M(t) f](x) = e^{i|x|^2/(4t)} f(x), t != 0.
Field apply_M(const Field& u, double t);

// How dilation sampling treats points outside the source box.
//  periodic: sample the periodic interpolant; guarded by a boundary-mass cap
//            (the wrap is an artifact, acceptable only when the tail that
//            would wrap in carries no mass).
//  zero:     treat the input as identically zero outside its box. Right for
//            evaluating a localized gridded object on a wider window, where
//            "no stored samples out there" means "the object has decayed".
enum class Extension { periodic, zero };

// [D(t) f](x) = (2t)^{-d/2} f(x/(2t)), t != 0 (principal branch for t < 0).
// Output on `out` if given, else on u.grid. When the sampling points x/(2t)
// leave the source box: in periodic mode the input's boundary mass must sit
// under `cap`, else domain_overflow_error; in zero mode those samples are
// exactly zero and `cap` is ignored.
Field apply_D(const Field& u, double t, std::optional<Grid> out = std::nullopt,
              double cap = 1e-8, Extension ext = Extension::periodic);

struct NormReport {
  double l2 = 0.0;
  double linf = 0.0;
  std::map<double, double> lp;                        // p -> L^p
  std::map<std::pair<double, double>, double> h_ms;   // (m, s) -> H^{m,s}
  double boundary_fraction = 0.0;
};

// L^p by grid quadrature, L^inf as max, H^{m,s} as the L2 norm of
// <xi>^m F[<x>^s u] (weight in x first, then in frequency).
NormReport norms(const Field& u, const std::vector<double>& ps = {},
                 const std::vector<std::pair<double, double>>& sobolev = {});

double lp_norm(const Field& u, double p);
double l2_norm(const Field& u);

// Space-time norm L^q_t L^q_x with q = 2(d+2)/d over the sampled window,
// trapezoid in t on the given (strictly increasing, >= 4) sample times.
double strichartz_norm(const std::vector<double>& times,
                       const std::vector<Field>& fields);

// Single-line JSON header {"d":..,"half_width":..,"points_per_axis":..}
// followed by little-endian float64 (re,im) pairs, row-major.
void dump_field(const Field& u, const std::string& path);
Field load_field(const std::string& path);

}  // namespace nls
