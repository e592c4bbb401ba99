#pragma once

#include "chromainv/dataset.hpp"
#include "chromainv/noise.hpp"
#include "chromainv/normalization.hpp"
#include "chromainv/split.hpp"
#include "chromainv/training.hpp"

#include <optional>
#include <span>
#include <vector>

namespace chromainv {

/// Overall and per-entry R^2 of a model on a set of samples.
struct EvalReport {
  double r2 = 0.0;
  std::vector<double> per_entry;
  std::size_t samples = 0;
};

struct TrainRunOptions {
  SplitSpec split;
  Hyperparams hp;
  /// cfg.seed drives initialization and shuffling.
  TrainConfig cfg;
  /// Maximum lag of the shift augmentation applied to the synthetic
  /// training and validation samples; 0 disables it.
  int augment_shift = 0;
  /// Master seed of the split and augmentation streams.
  std::uint64_t seed = 0;
};

struct TrainRun {
  /// Indices into the synthetic and real sample lists of the dataset.
  SplitPlan plan;
  std::vector<std::size_t> synthetic_index;
  std::vector<std::size_t> real_index;
  /// Lags drawn for the synthetic training and validation samples.
  std::vector<int> augment_shifts;
  SplitSets sets;
  NormStats stats;
  TrainResult result;
  EvalReport train;
  EvalReport validation;
  EvalReport test;
};

/// Splits the dataset (test from synthetic samples only), optionally
/// shift-augments the synthetic training and validation samples, fits
/// NormStats on the training set, trains and evaluates every set. The test
/// set is left uncorrupted so noise scenarios can be applied on top.
TrainRun run_training(const Dataset& dataset, const TrainRunOptions& options);

/// Evaluates the model on `samples`, corrupting each sample k first with
/// make_stream(seed, "noise", k) when a noise spec is given.
EvalReport evaluate(const FnnModel& model, const NormStats& stats, std::span<const Sample> samples,
                    const std::optional<NoiseSpec>& noise = std::nullopt, std::uint64_t seed = 0);

/// Resamples every response onto `grid` with monotone cubic interpolation.
std::vector<Sample> regrid_samples(std::span<const Sample> samples, std::span<const double> from_grid,
                                   std::span<const double> grid);

} // namespace chromainv
