#pragma once

#include "chromainv/isotherm.hpp"

#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace chromainv {

/// Physical and numerical constants of the column. Units: cm, s, mM.
///
/// Defaults are the propranolol/alprenolol Kromasil C18 setup
/// (L = 15 cm, u = 0.125 cm/s, F = 0.78, 9000 plates) at desk resolution.
struct ColumnConfig {
  double length = 15.0;
  double velocity = 0.125;
  double phase_ratio = 0.78;
  /// Apparent dispersion D_a in cm^2/s. When empty it is derived from the
  /// plate count as L*u / (2*N).
  std::optional<double> diffusion;
  int plate_count = 9000;
  int n_cells = 200;
  /// Simulated horizon T in s. When empty it is chosen per run: the
  /// smallest multiple of the dead time (>= 2) at which the outlet has
  /// washed out, capped at kMaxHorizonDeadTimes dead times.
  std::optional<double> horizon;
  int n_time_points = 800;
  double injection_duration = 10.0;
  /// dt = cfl_safety * min(dx/u, dx^2/(2 D_a)).
  double cfl_safety = 0.5;

  static constexpr double kMaxHorizonDeadTimes = 20.0;

  double dead_time() const { return length / velocity; }
  double effective_diffusion() const;
  double cell_width() const { return length / n_cells; }
  double time_step() const;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// Rectangular inlet pulse h_mu(t) = H(duration - t) * hbar_mu with H(0) = 0.
struct InjectionProfile {
  double hbar1 = 0.0;
  double hbar2 = 0.0;
  double duration = 10.0;

  void validate() const;
  InjectionProfile swapped_components() const { return {hbar2, hbar1, duration}; }
};

/// Inlet concentration at time t; the pulse covers [0, duration).
Concentration2 boundary_value(const InjectionProfile& profile, double t);

/// Per-component outlet concentration C_mu(L, t_i) on the uniform grid
/// t_i = i*T/N_T, i = 1..N_T.
struct OutletSeries {
  std::vector<double> time;
  std::vector<double> c1;
  std::vector<double> c2;
  double horizon = 0.0;

  // Exact discrete mass bookkeeping per component (amount per unit
  // cross-section, mM*cm): what entered, what left through the outlet and
  // what is still held in mobile + stationary phase at the horizon.
  std::array<double, 2> injected{};
  std::array<double, 2> eluted{};
  std::array<double, 2> retained{};
  long steps = 0;
};

/// Solves the two-component equilibrium-dispersive model
///
///   dC/dt + F dq(C)/dt + u dC/dx = D_a d2C/dx2
///   C(0,t) - (D_a/u) dC/dx(0,t) = h(t),  dC/dx(L,t) = 0,  C(x,0) = g
///
/// with a cell-centred finite-volume scheme (first-order upwind
/// convection, central diffusion, explicit Euler in the conserved amount
/// m = C + F q(C)). Each step solves (I + F J_q) dC = dm per cell by a
/// Newton iteration started from the previous state.
///
/// Throws ValidationError for bad inputs and NumericalError on a CFL
/// violation, a failed per-cell solve or a non-finite state.
OutletSeries simulate(const ColumnConfig& config, const IsothermParams& params, const InjectionProfile& profile,
                      Concentration2 initial = {});

/// Detector model: per-component linear calibration and a saturation cap.
struct DetectorSpec {
  std::array<double, 2> gain{1.0, 1.0};
  double r_max = std::numeric_limits<double>::infinity();

  void validate() const;
};

/// Detector trace r^obs at time_grid.
struct Chromatogram {
  std::vector<double> time;
  std::vector<double> response;

  /// Lengths equal, time strictly increasing, responses finite and >= 0.
  void validate() const;
};

/// r_i = min(gain_1 C_1(t_i) + gain_2 C_2(t_i), r_max).
Chromatogram total_response(const OutletSeries& outlet, const DetectorSpec& detector);

} // namespace chromainv
