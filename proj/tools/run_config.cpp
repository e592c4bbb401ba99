#include "run_config.hpp"

#include "chromainv/error.hpp"

namespace chromainv::cli {
namespace {

template <class T>
T get_as(const Json& j, const char* key, const char* context)
{
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(context) + "." + key + ": " + e.what());
  }
}

} // namespace

RunConfig run_config_from_json(const Json& j)
{
  reject_unknown_keys(j,
                      {"seed", "threads", "column", "detector", "datagen", "split", "model", "training", "grid",
                       "variational", "cv"},
                      "config");
  RunConfig c;
  if (j.contains("seed"))
    c.seed = get_as<std::uint64_t>(j, "seed", "config");
  if (j.contains("threads"))
    c.threads = get_as<unsigned>(j, "threads", "config");
  if (j.contains("column"))
    c.column = column_config_from_json(j.at("column"));
  if (j.contains("detector"))
    c.detector = detector_from_json(j.at("detector"));
  if (j.contains("datagen")) {
    const Json& d = j.at("datagen");
    reject_unknown_keys(d, {"n", "canonical_sites"}, "datagen");
    if (d.contains("n"))
      c.n = get_as<std::size_t>(d, "n", "datagen");
    if (d.contains("canonical_sites"))
      c.canonical_sites = get_as<bool>(d, "canonical_sites", "datagen");
  }
  if (j.contains("split")) {
    const Json& s = j.at("split");
    reject_unknown_keys(s, {"test_fraction", "train_fraction_of_rest", "real_ratio"}, "split");
    if (s.contains("test_fraction"))
      c.split.test_fraction = get_as<double>(s, "test_fraction", "split");
    if (s.contains("train_fraction_of_rest"))
      c.split.train_fraction_of_rest = get_as<double>(s, "train_fraction_of_rest", "split");
    if (s.contains("real_ratio"))
      c.split.real_ratio = get_as<double>(s, "real_ratio", "split");
    c.split.validate();
  }
  if (j.contains("model"))
    c.model = hyperparams_from_json(j.at("model"), c.model);
  if (j.contains("training")) {
    c.training = train_config_from_json(j.at("training"), c.training);
    c.training_seed_explicit = j.at("training").contains("seed");
  }
  if (!c.training_seed_explicit)
    c.training.seed = c.seed;
  if (j.contains("grid"))
    c.grid = grid_space_from_json(j.at("grid"));
  if (j.contains("variational"))
    c.variational = variational_config_from_json(j.at("variational"), c.variational);
  if (j.contains("cv")) {
    const Json& v = j.at("cv");
    reject_unknown_keys(v, {"k"}, "cv");
    if (v.contains("k"))
      c.cv_folds = get_as<int>(v, "k", "cv");
    if (c.cv_folds < 2)
      throw ValidationError("cv.k must be >= 2");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_json_file(path)); }

Json to_json(const RunConfig& c)
{
  return Json{{"seed", c.seed},
              {"threads", c.threads},
              {"column", to_json(c.column)},
              {"detector", to_json(c.detector)},
              {"datagen", {{"n", c.n}, {"canonical_sites", c.canonical_sites}}},
              {"split",
               {{"test_fraction", c.split.test_fraction},
                {"train_fraction_of_rest", c.split.train_fraction_of_rest},
                {"real_ratio", c.split.real_ratio}}},
              {"model", to_json(c.model)},
              {"training", to_json(c.training)},
              {"grid", to_json(c.grid)},
              {"variational", to_json(c.variational)},
              {"cv", {{"k", c.cv_folds}}}};
}

} // namespace chromainv::cli
