#pragma once

#include <string>
#include <vector>

#include "nls/evolution.hpp"
#include "nls/profiles.hpp"

namespace nls {

// Profile-frame view of a snapshot: w(t, xi) = e^{i d pi/4} (M(t) D(t))^{-1}
// u(t) sampled on the dual lattice, so that modified scattering reads
// w(t) -> u_hat_plus e^{-i lambda |u_hat_plus|^{2/d} log t}.
Field profile_frame(const Field& u, double t);

struct ScatteringMetrics {
  std::vector<double> times;
  std::vector<double> l2_distance;       // ||u(t) - V_lambda(t)||_2
  std::vector<double> tail_strichartz;   // t^{d/(2(d+2))} x space-time q-norm
                                         // of u - V on [t, T_end], q = 2(d+2)/d
  double lambda_used = 0.0;
};

ScatteringMetrics scattering_metrics(const Trajectory& traj,
                                     const ScatteringDatum& dat,
                                     const PhaseCorrection& ph);

struct LambdaFit {
  double lambda_hat = 0.0;
  std::vector<double> probe_xi;
  std::vector<double> probe_slope;  // d(arg w)/d(log t) per probe
  double r2_min = 1.0;
};

// Unwrapped probe phases regressed on log t over snapshots in [t_fit, T_end];
// requires >= 1.5 decades and per-sample phase increments < pi (else
// undersampled_error). |u_hat_plus| weights come from the datum. The
// regression carries a 1/t nuisance column: the frame phase obeys
// theta = const - lambda |u_hat|^{2/d} log t + C/t + O(t^{-2}) where the C/t
// term is the free dispersive transient, and at small amplitude that
// transient would otherwise bleed into the log t slope. The reported slope
// is the log t coefficient alone.
LambdaFit lambda_fit(const Trajectory& traj, const ScatteringDatum& dat,
                     const std::vector<double>& probe_xi, double t_fit);

// Datum read off the stored profile at the anchor (last) snapshot, with the
// lambda phase unwound so V_lambda(anchor) reproduces u(anchor).
ScatteringDatum extract_datum(const Trajectory& traj, double lambda);

// Pairing functionals of the asymptotic argument, over a sampled dyadic
// window u(s), s in [t, 2t] (>= 16 nodes). All integrals are trapezoid in s;
// the inner product is the L2 pairing (a, b) = \int a conj(b).
struct SampledWindow {
  std::vector<double> s;
  std::vector<Field> u;
};

// (-i \int_t^{2t} U(-s) F_0(u(s)) ds, H(t)); -> ||G||_2^2 when u follows the
// modified-scattering profile.
cplx pairing_key1(const SampledWindow& w, const ScatteringDatum& dat, double t);

// (U(-sigma t) u(sigma t), H(t)) -> 0.
cplx pairing_key2(const Field& u_at_sigma_t, double sigma_t,
                  const ScatteringDatum& dat, double t, const Grid& g);

// sum_{n != 0} g_n (\int_t^{2t} U(-s) F_n(u(s)) ds, H(t)) -> 0.
cplx pairing_key3(const SampledWindow& w, const CoefficientSpectrum& spec,
                  const ScatteringDatum& dat, double t);

// (\int_t^{2t} U(-s) F_1(u(s)) ds, u_plus); under the free profile this tends
// to (log 2)/2 ||u_hat_plus||^{2(d+1)/d}_{L^{2(d+1)/d}}.
cplx barab_pairing(const SampledWindow& w, const ScatteringDatum& dat, double t);

struct ClassifyConfig {
  double theta_s = 0.05;          // modified-scattering distance threshold
  double theta_n = 0.2;           // non-scattering floor
  double lambda_free = 0.02;      // |lambda| below which scattering is free
  double trend_tol = 1e-3;        // |d(distance)/d(log t)| treated as flat
  int lambda_grid_points = 41;    // on [-2, 2]
  double lambda_grid_span = 2.0;
  double t_fit = 10.0;
  std::vector<double> probe_xi = {0.0, 0.25, -0.25, 0.5, -0.5};
};

struct Verdict {
  std::string classification;  // free-scattering | modified-scattering |
                               // non-scattering | blowup | inconclusive
  double lambda_hat = 0.0;
  double ref_l2 = 0.0;              // ||u_plus||_2 of the extracted datum
  double final_rel_distance = 0.0;  // at the end of the stats window
  double trend_slope = 0.0;         // d(l2_distance)/d(log t), last decade
  double inf_grid_mean_rel = 0.0;   // inf over lambda grid of mean rel distance
  double inf_grid_trend = 0.0;
  std::string detail;
};

Verdict classify(const Trajectory& traj, const ClassifyConfig& cfg);

// Distance in the profile frame at a given lambda, using the anchor-extracted
// datum; unitarily equivalent to the physical-side l2_distance.
std::vector<double> frame_distances(const std::vector<double>& times,
                                    const std::vector<Field>& w_series,
                                    const Field& w_anchor, double anchor_t,
                                    double lambda, int d);

}  // namespace nls
