#pragma once

#include "chromainv/column.hpp"
#include "chromainv/isotherm.hpp"
#include "chromainv/random.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chromainv {

enum class Origin { synthetic, real };

std::string to_string(Origin origin);

/// One (x, y) pair. The model input x is the concatenation
/// (response[0..N_T-1], injection[0], injection[1]).
struct Sample {
  std::vector<double> response;
  std::array<double, 2> injection{};
  std::optional<IsothermParams> target;
  Origin origin = Origin::synthetic;

  std::size_t feature_count() const { return response.size() + 2; }
  std::vector<double> features() const;
};

/// Settings shared by every sample of a dataset.
struct DatasetMeta {
  ColumnConfig column;
  DetectorSpec detector;
  std::uint64_t seed = 0;
  std::vector<double> time_grid;
  bool canonical_sites = true;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Sample> samples;

  std::size_t n_time_points() const { return meta.time_grid.size(); }
};

/// Upper bounds of the sampling boxes: targets ~ U(0, 100)^8,
/// injections ~ U(0, 30)^2.
inline constexpr double kTargetUpper = 100.0;
inline constexpr double kInjectionUpper = 30.0;

IsothermParams sample_target(Rng& rng);
std::array<double, 2> sample_injection(Rng& rng);

/// Relabels the two adsorption sites so that site I has the smaller
/// b-sum (b_{.,1} + b_{.,2}). The isotherm is invariant under the site
/// swap, so this only picks a representative of each equivalence class.
IsothermParams canonical_site_order(const IsothermParams& params);

/// Horizon used for datasets: the configured one or the capped automatic
/// horizon, so every sample shares one output grid.
ColumnConfig dataset_column(const ColumnConfig& column);

/// Simulates one sample.
Sample make_sample(const ColumnConfig& column, const DetectorSpec& detector, const IsothermParams& target,
                   std::array<double, 2> injection);

struct GenerateOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool canonical_sites = true;
};

/// n synthetic samples. Sample k draws its target and injection from
/// make_stream(seed, "sample", k), so the result does not depend on the
/// thread count. Solver failures are rethrown with the sample index.
Dataset generate(std::size_t n, const ColumnConfig& column, const DetectorSpec& detector,
                 const GenerateOptions& options);

/// Shifts a series by tau points (positive = delay), zero-filling.
std::vector<double> shift_series(std::span<const double> series, int tau);

/// Shifts every synthetic sample's response by an independent draw from
/// {-max_shift, ..., max_shift}. Drawn shifts are appended to `drawn` when
/// given. Injection entries are untouched.
Dataset augment_shift(const Dataset& dataset, int max_shift, Rng& rng, std::vector<int>* drawn = nullptr);

} // namespace chromainv
