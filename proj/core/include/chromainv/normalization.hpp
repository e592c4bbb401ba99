#pragma once

#include "chromainv/dataset.hpp"

#include <span>
#include <string>
#include <vector>

namespace chromainv {

/// Per-feature z-score statistics over the N_T + 2 model inputs, fitted on
/// training samples with the population denominator.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t size() const { return mean.size(); }
  /// Stable 64-bit hash of the statistics, hex encoded.
  std::string fingerprint() const;
};

NormStats fit_norm(std::span<const Sample> training);

/// (x - mean) / stddev per feature; features with stddev == 0 are only
/// centred.
std::vector<double> normalize(std::span<const double> features, const NormStats& stats);

/// Sample whose response and injection hold the standardized features.
Sample normalize(const Sample& sample, const NormStats& stats);

} // namespace chromainv
