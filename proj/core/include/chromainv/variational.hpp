#pragma once

#include "chromainv/column.hpp"

#include <array>
#include <span>
#include <vector>

namespace chromainv {

/// One measured elution profile and the injection that produced it.
struct Observation {
  Chromatogram chromatogram;
  InjectionProfile injection;
  /// w = 1 / sum_i r_i^2; set by assign_weights.
  double weight = 1.0;
};

/// w_s = 1 / sum_i (r_i^s)^2, so that w_s * SS_s = 1 for every
/// observation. Throws ValidationError for an all-zero chromatogram.
std::vector<double> weight_normalize(std::span<const Observation> observations);

/// Stores weight_normalize results in the observations.
void assign_weights(std::span<Observation> observations);

struct ObjectiveTerms {
  /// sum_s w_s sum_i (r_sim - r_obs)^2
  double data = 0.0;
  /// sum_s w_s (sum_i t_i (r_sim - r_obs))^2, not scaled by alpha
  double moment = 0.0;
  double total = 0.0;
  std::vector<double> data_per_observation;
  std::vector<double> moment_per_observation;
};

/// Simulated detector trace on the observation's time grid. A grid of the
/// form t_i = i*T/N is simulated directly; any other grid is simulated on
/// the column's own grid and resampled by monotone cubic interpolation.
Chromatogram simulate_observation(const IsothermParams& y, const Observation& obs, const ColumnConfig& column,
                                  const DetectorSpec& detector);

/// Injection-weighted least squares with first-moment regularization:
/// data + alpha * moment. Observation weights are used as stored.
ObjectiveTerms objective_terms(const IsothermParams& y, std::span<const Observation> observations,
                               const ColumnConfig& column, const DetectorSpec& detector, double alpha);

double objective(const IsothermParams& y, std::span<const Observation> observations, const ColumnConfig& column,
                 const DetectorSpec& detector, double alpha);

struct VariationalConfig {
  double alpha = 0.0;
  /// Box [0, upper] per parameter.
  std::array<double, IsothermParams::size> upper{100, 100, 100, 100, 100, 100, 100, 100};
  IsothermParams initial{std::array<double, IsothermParams::size>{10, 1, 10, 1, 10, 1, 10, 1}};
  /// Nelder-Mead iterations summed over all restarts.
  int max_iterations = 2000;
  /// Stop when the simplex objective spread falls to this value.
  double tolerance = 1e-10;
  /// Initial simplex edge relative to max(|x_j|, 1% of the box width).
  double initial_step = 0.1;
  /// Fresh simplices built around the best point after convergence.
  int restarts = 2;
  unsigned threads = 1;

  void validate() const;
};

struct FitResult {
  IsothermParams estimate;
  ObjectiveTerms terms;
  int iterations = 0;
  int evaluations = 0;
  /// False when the iteration cap was hit before the tolerance was met.
  bool converged = false;
  /// Best objective so far, one entry for the start point and one per
  /// iteration; non-increasing.
  std::vector<double> trace;
};

/// Minimizes the objective over the box by Nelder-Mead, projecting every
/// trial point onto the box. Observation weights are recomputed from the
/// chromatograms.
FitResult fit(std::vector<Observation> observations, const ColumnConfig& column, const DetectorSpec& detector,
              const VariationalConfig& cfg);

struct AlphaSweepRow {
  double alpha = 0.0;
  FitResult fit;
};

/// One fit per alpha, each started from cfg.initial.
std::vector<AlphaSweepRow> alpha_sweep(const std::vector<Observation>& observations, const ColumnConfig& column,
                                       const DetectorSpec& detector, const VariationalConfig& cfg,
                                       std::span<const double> alphas);

/// n values spaced evenly in log10 between lo and hi (inclusive).
std::vector<double> log_grid(double lo, double hi, int n);

} // namespace chromainv
