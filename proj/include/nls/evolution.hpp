#pragma once

#include <string>
#include <vector>

#include "nls/grid.hpp"
#include "nls/nonlinearity.hpp"
#include "nls/spectral.hpp"

namespace nls {

struct SimulationConfig {
  Grid grid;
  NonlinearitySpec nl;
  double t_start = 0.0;
  double t_end = 1.0;

  // Adaptive step: dt = dt_cap_c / (1 + ||u||_inf^{2/d}), unless fixed_dt.
  double dt_cap_c = 0.1;
  bool fixed_dt = false;
  double dt = 0.0;

  // 2/3-rule dealiasing. Default chosen from the spectrum: on for
  // polynomial-equivalent F, off otherwise (|.|-powers are not band-limited,
  // masking them only discards resolution).
  bool dealias = true;
  bool dealias_set = false;  // when false, default is derived from nl

  double blowup_mass_factor = 1e3;  // on mass = ||u||_2^2
  double blowup_linf = 1e6;
  double boundary_cap = 1e-8;

  std::vector<double> snapshot_times;
  unsigned substep_cycle_cap = 200000;
};

struct ScalarSample {
  double t = 0.0;
  double mass = 0.0;  // ||u||_2^2
  double linf = 0.0;
  double boundary_fraction = 0.0;
};

enum class Termination { reached_end, blowup, domain_overflow };

struct Trajectory {
  std::vector<double> snap_times;
  std::vector<Field> snapshots;
  std::vector<ScalarSample> scalars;  // one per step
  Termination termination = Termination::reached_end;
  double end_time = 0.0;
  std::string reason;  // blowup trigger or overflow detail
  // Worst per-step mismatch of the scheme identity
  // d/dt ||u||_2^2 = 2 \int Im(conj(u) F(u)), relative to the mass.
  double max_mass_identity_residual = 0.0;
  int steps = 0;
};

// One Strang step: half free kick, pointwise nonlinear substep, half kick.
void step_strang(Field& u, double dt, const NonlinearitySpec& nl, bool dealias);

// Exact pointwise flow of w' = -i F(w) over dt where available (single-mode
// n = 1 with real coefficient, or empty spectrum); otherwise micro-RK4 with
// sub-cycling. Returns the time quadrature of 2 Im(conj(w) F(w)) summed over
// points (unweighted), for the mass-identity check.
double nonlinear_substep(Field& u, double dt, const NonlinearitySpec& nl,
                         unsigned cycle_cap);

Trajectory run(const SimulationConfig& cfg, const Field& u0);

}  // namespace nls
