#pragma once

#include "chromainv/dataset.hpp"

#include <span>
#include <vector>

namespace chromainv {

struct SplitSpec {
  double test_fraction = 0.20;
  double train_fraction_of_rest = 0.75;
  /// Synthetic samples per real-sample slot in a set (10 means 1:10).
  double real_ratio = 10.0;

  void validate() const;
};

/// Number of real reals routed to validation; the rest go to training.
inline constexpr std::size_t kRealValidationCount = 2;
inline constexpr std::size_t kMinRealSamples = 5;

/// Index lists into the synthetic and real sample arrays. Real lists
/// include the intentional duplicates.
struct SplitPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::vector<std::size_t> real_train;
  std::vector<std::size_t> real_validation;
};

/// Test is drawn from synthetic data only; of the rest train_fraction_of_rest
/// goes to training. With real samples, all but two go to training and two
/// to validation, each duplicated round-robin until real:synthetic reaches
/// 1:real_ratio in its set. Throws ValidationError when 0 < n_real < 5.
SplitPlan split(std::size_t n_synthetic, std::size_t n_real, const SplitSpec& spec, Rng& rng);

/// Number of real slots for a set holding n_synthetic synthetic samples.
std::size_t real_slot_count(std::size_t n_synthetic, std::size_t n_distinct_real, double real_ratio);

struct SplitSets {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

SplitSets materialize(const SplitPlan& plan, std::span<const Sample> synthetic, std::span<const Sample> real);

} // namespace chromainv
