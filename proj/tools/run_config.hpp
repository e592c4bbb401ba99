#pragma once

#include "chromainv/column.hpp"
#include "chromainv/serialization.hpp"
#include "chromainv/split.hpp"
#include "chromainv/training.hpp"
#include "chromainv/variational.hpp"

#include <cstdint>
#include <filesystem>

namespace chromainv::cli {

/// Every setting a command can take from the structured config file. Each
/// section starts from the library defaults; present keys override them
/// and unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  ColumnConfig column;
  DetectorSpec detector;
  std::size_t n = 0;
  bool canonical_sites = true;
  SplitSpec split;
  Hyperparams model{{140, 112, 84}, LossNorm::l2, Activation::sigmoid, 0.01, 0.001};
  /// training.seed follows the master seed unless set explicitly.
  TrainConfig training;
  bool training_seed_explicit = false;
  GridSpace grid = GridSpace::standard();
  VariationalConfig variational;
  int cv_folds = 5;
  unsigned threads = 1;
};

RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
Json to_json(const RunConfig& cfg);

} // namespace chromainv::cli
