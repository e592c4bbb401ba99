#pragma once

#include "chromainv/column.hpp"
#include "chromainv/fnn.hpp"
#include "chromainv/normalization.hpp"
#include "chromainv/training.hpp"
#include "chromainv/variational.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>

namespace chromainv {

using Json = nlohmann::json;

// Structured-text (JSON) forms of the configuration types. The *_from_json
// readers start from defaults, override present keys and reject unknown
// keys with ValidationError.

Json to_json(const ColumnConfig& config);
ColumnConfig column_config_from_json(const Json& j);

Json to_json(const DetectorSpec& detector);
DetectorSpec detector_from_json(const Json& j);

Json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const Json& j);

Json to_json(const IsothermParams& params);
IsothermParams isotherm_params_from_json(const Json& j);

/// Model file: layer sizes, activation, output scale, row-major weight
/// matrices, bias vectors and the fingerprint of the NormStats used in
/// training.
Json to_json(const FnnModel& model, const std::string& norm_fingerprint);
/// Reads a model file; the stored fingerprint is returned through
/// `norm_fingerprint` when given.
FnnModel fnn_model_from_json(const Json& j, std::string* norm_fingerprint = nullptr);

Json to_json(const TrainConfig& cfg);
/// Starts from `base` and overrides present keys.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});

Json to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const Json& j, Hyperparams base = {});

Json to_json(const GridSpace& space);
GridSpace grid_space_from_json(const Json& j);

Json to_json(const VariationalConfig& cfg);
VariationalConfig variational_config_from_json(const Json& j, VariationalConfig base = {});

Json to_json(const FitResult& result);

/// Throws ValidationError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

} // namespace chromainv
