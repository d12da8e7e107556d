#pragma once

#include <map>
#include <string>
#include <vector>

#include "nls/evolution.hpp"

namespace nls {

// Test-function pair for the weak-identity machinery:
//   phi(x) = exp(1 - sqrt(1 + |a x|^2)),  a calibrated so \int phi = 1,
//   eta(t) = (1 - t)^theta on [0, 1], 0 after,  theta >= 1 + d/2,
//   psi_R(t, x) = eta(t / R^2) phi(x / R).
struct TestFunctions {
  int d = 1;
  double a = 0.0;
  double theta = 2.0;
  double M = 0.0;  // sup |Laplacian phi| / phi
  double N = 0.0;  // sup |eta'| / eta^{d/(d+2)} = theta (attained at t = 0)
};

double phi_of(const TestFunctions& tf, double r);       // phi(|x|)
double lap_phi_of(const TestFunctions& tf, double r);   // closed-form (Delta phi)(|x|)
double eta_of(const TestFunctions& tf, double t);       // eta(t), unit scale
double eta_prime_of(const TestFunctions& tf, double t);

// a by bisection on \int phi = 1; M by grid max of |Delta phi|/phi with a
// spectral Laplacian; N = theta (closed form, re-checked by dense sampling).
TestFunctions calibrate_test_functions(int d, double theta = 2.0);

// Data f with -Im f >= |x|^{-k} outside R0 and >= 0 inside, validated on the
// grid at construction. The shipped family is f = -i c (R0^2 + |x|^2)^{-k/2}
// with c = 2^{k/2}, the smallest constant that works on all of |x| > R0.
struct BlowupDatum {
  int d = 1;
  double k = 0.5;   // 0 < k <= d; in L2 needs k > d/2
  double R0 = 1.0;
  Field f;
};

BlowupDatum make_blowup_datum(const Grid& g, double k, double R0 = 1.0);

// Residual of the weak space-time identity
//   \int_0^{R^2}\int u (-i dpsi/dt + Delta psi) = i eps \int f psi(0)
//     + sum_n g_n \int_0^{R^2}\int F_n(u) psi
// with psi = psi_R (closed-form derivatives), trapezoid in t over snapshots.
// For a convergent scheme it shrinks ~4x under dt, h halving.
cplx weak_residual(const Trajectory& traj, const NonlinearitySpec& nl,
                   const TestFunctions& tf, double R, double eps,
                   const Field& f);

struct Functionals {
  std::map<int, cplx> I;  // I_n(R) = \int_0^{R^2}\int F_n(u) psi_R
  cplx J;                 // \int f phi_R
  double I0 = 0.0;        // I_0 is real nonnegative
};
Functionals functionals(const Trajectory& traj, const NonlinearitySpec& nl,
                        const TestFunctions& tf, double R, const Field& f);

struct Lemma51Report {
  double mu = 0.0;
  double C1 = 0.0;        // M + N
  double s_star = 0.0;    // argmax of C1 s^{d/(d+2)} - mu s
  double C_star = 0.0;    // the max itself
  double s_star_golden = 0.0;
  double lhs = 0.0;       // -eps Im J(R)
  double raw_lhs = 0.0;   // -eps Im J + Re sum_n g_n I_n (identity real part)
  double raw_rhs = 0.0;   // C1 I0^{d/(d+2)} (+ residual slack applied by caller)
  bool bound_ok = false;  // lhs <= C_star and raw inequality within slack
};

// mu must be positive (else config_error). Closed-form maximizer is
// cross-checked against golden-section search to 1e-8.
Lemma51Report lemma51_check(const Trajectory& traj, const NonlinearitySpec& nl,
                            const TestFunctions& tf, double R, double eps,
                            const Field& f, double residual_slack = 0.0);

struct SweepPoint {
  double eps = 0.0;
  double t_detected = 0.0;
  std::string trigger;  // linf | mass | nan | none
  int resolution = 0;
  bool excluded = false;  // domain-overflow runs
};

struct SweepFit {
  std::string regime;      // "k<d" or "k=d"
  double slope_or_rate = 0.0;
  double target = 0.0;     // -2/(d-k) for k < d; 0 for k = d
  double r_squared = 0.0;
  double envelope_C = 0.0; // k = d: max eps log t, so t <= exp(C/eps) for all points
};

struct SweepResult {
  std::vector<SweepPoint> points;
  SweepFit fit;
};

struct SweepConfig {
  Grid grid;
  NonlinearitySpec nl;
  double k = 0.5;
  double R0 = 1.0;
  std::vector<double> eps_list;  // >= 6 points spanning >= 1 decade
  double t_max = 1e4;
  double dt_cap_c = 0.05;
  double boundary_cap = 0.05;
  double blowup_linf = 1e6;
  double blowup_mass_factor = 1e3;
};

// Fixed datum shape, scaled by eps; fit of detected times: log t vs log eps
// (k < d) or log t vs 1/eps (k = d). Overflow runs are excluded and flagged.
SweepResult sweep(const SweepConfig& cfg);

}  // namespace nls
