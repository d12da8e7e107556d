#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nls/grid.hpp"
#include "nls/nonlinearity.hpp"
#include "nls/spectral.hpp"

namespace nls {

// Prescribed scattering datum u_plus, held on the frequency side. Named data
// ("gauss", "bump") carry a closed form used for exact pointwise evaluation;
// gridded data are evaluated by band-limited resampling.
struct ScatteringDatum {
  int d = 1;
  std::string id;  // gauss | bump | gridded
  double amp = 1.0;
  double sigma = 1.0;  // gauss: amp e^{-|xi|^2/(2 sigma^2)}; bump: support radius
  std::optional<Field> uhat;  // gridded samples (ascending frequency order)
  double regularity = 0.0;    // H^{0, d/(d+2)} norm of u_plus

  bool closed_form() const { return !uhat.has_value(); }
  cplx eval_uhat(const double* xi) const;  // closed-form path only
};

ScatteringDatum make_datum(const std::string& id, int d, double amp = 1.0,
                           double sigma = 1.0);
ScatteringDatum make_gridded_datum(Field uhat);

// Phase rule phi(t, xi) applied inside the dilation: the evolved profile is
//   V(t, x) = e^{-i d pi/4} (2t)^{-d/2} e^{i|x|^2/(4t)}
//             [u_hat_plus e^{i phi(t, .)}](x/(2t)).
// Constant-lambda rule: phi = -lambda |u_hat_plus(xi)|^{2/d} log t. The
// decay-compatibility flag is a caller declaration, never verified here: the
// shipped "adversarial" rule phi = -t |xi|^2 on |xi| <= 1 satisfies the
// integral smallness condition yet destroys scattering, which is exactly why
// no check can be derived from it.
struct PhaseCorrection {
  bool constant_lambda = true;
  double lambda = 0.0;
  std::function<double(double, const double*)> phi;  // general rule
  bool decay_compat_declared = false;

  double eval(double t, const double* xi, double uhat_abs, int d) const;
};

PhaseCorrection constant_phase(double lambda);
PhaseCorrection adversarial_phase();

// V_phi(t) on the grid; t > 0.
Field eval_profile(const ScatteringDatum& dat, const PhaseCorrection& ph,
                   double t, const Grid& g);

// G(x) = \int_1^2 (2 sigma)^{-1-d/2} |u_hat_plus(x/(2 sigma))|^{1+2/d} dsigma
// by 64-node Gauss-Legendre; real and nonnegative.
Field eval_G(const ScatteringDatum& dat, const Grid& g);
double eval_G_point(const ScatteringDatum& dat, const double* x);  // closed-form data

// H(t) = -i D(t/2) G, the scale on which H(t) = -i \int_t^{2t} F_0(V(s)) ds
// holds exactly (identity point: H(1) = -iG).
Field eval_H(const ScatteringDatum& dat, double t, const Grid& g);

// || U(t) u_plus - V_0(t) ||_L2 for each t; decays for data in H^{0,d/(d+2)}.
std::vector<double> free_minus_profile_decay(const ScatteringDatum& dat,
                                             const std::vector<double>& ts,
                                             const Grid& g);

// u_plus on the spatial grid (inverse transform of the datum).
Field datum_uplus(const ScatteringDatum& dat, const Grid& g);
// u_hat_plus sampled on the dual of g.
Field datum_uhat(const ScatteringDatum& dat, const Grid& g);

}  // namespace nls
