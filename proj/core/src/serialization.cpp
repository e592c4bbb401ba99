#include "chromainv/serialization.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace chromainv {
namespace {

template <class T>
T get_as(const Json& j, std::string_view key, std::string_view context)
{
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(context) + "." + std::string(key) + ": " + e.what());
  }
}

std::vector<double> double_array(const Json& j, std::string_view key, std::string_view context)
{
  if (!j.contains(std::string(key)) || !j.at(std::string(key)).is_array())
    throw ValidationError(std::string(context) + ": missing array '" + std::string(key) + "'");
  return get_as<std::vector<double>>(j, key, context);
}

} // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context)
{
  if (!j.is_object())
    throw ValidationError(std::string(context) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed)
      known = known || key == a;
    if (!known)
      throw ValidationError("unknown key '" + key + "' in " + std::string(context));
  }
}

Json to_json(const ColumnConfig& c)
{
  Json j = {
      {"length", c.length},
      {"velocity", c.velocity},
      {"phase_ratio", c.phase_ratio},
      {"plate_count", c.plate_count},
      {"n_cells", c.n_cells},
      {"n_time_points", c.n_time_points},
      {"injection_duration", c.injection_duration},
      {"cfl_safety", c.cfl_safety},
  };
  j["diffusion"] = c.diffusion ? Json(*c.diffusion) : Json(nullptr);
  j["horizon"] = c.horizon ? Json(*c.horizon) : Json(nullptr);
  return j;
}

ColumnConfig column_config_from_json(const Json& j)
{
  constexpr std::string_view ctx = "column";
  reject_unknown_keys(j,
                      {"length", "velocity", "phase_ratio", "diffusion", "plate_count", "n_cells", "horizon",
                       "n_time_points", "injection_duration", "cfl_safety"},
                      ctx);
  ColumnConfig c;
  if (j.contains("length"))
    c.length = get_as<double>(j, "length", ctx);
  if (j.contains("velocity"))
    c.velocity = get_as<double>(j, "velocity", ctx);
  if (j.contains("phase_ratio"))
    c.phase_ratio = get_as<double>(j, "phase_ratio", ctx);
  if (j.contains("diffusion") && !j.at("diffusion").is_null())
    c.diffusion = get_as<double>(j, "diffusion", ctx);
  if (j.contains("plate_count"))
    c.plate_count = get_as<int>(j, "plate_count", ctx);
  if (j.contains("n_cells"))
    c.n_cells = get_as<int>(j, "n_cells", ctx);
  if (j.contains("horizon") && !j.at("horizon").is_null())
    c.horizon = get_as<double>(j, "horizon", ctx);
  if (j.contains("n_time_points"))
    c.n_time_points = get_as<int>(j, "n_time_points", ctx);
  if (j.contains("injection_duration"))
    c.injection_duration = get_as<double>(j, "injection_duration", ctx);
  if (j.contains("cfl_safety"))
    c.cfl_safety = get_as<double>(j, "cfl_safety", ctx);
  c.validate();
  return c;
}

Json to_json(const DetectorSpec& d)
{
  Json j = {{"gain", {d.gain[0], d.gain[1]}}};
  j["r_max"] = std::isinf(d.r_max) ? Json(nullptr) : Json(d.r_max);
  return j;
}

DetectorSpec detector_from_json(const Json& j)
{
  constexpr std::string_view ctx = "detector";
  reject_unknown_keys(j, {"gain", "r_max"}, ctx);
  DetectorSpec d;
  if (j.contains("gain")) {
    const auto g = get_as<std::vector<double>>(j, "gain", ctx);
    if (g.size() != 2)
      throw ValidationError("detector.gain must have two entries");
    d.gain = {g[0], g[1]};
  }
  if (j.contains("r_max") && !j.at("r_max").is_null())
    d.r_max = get_as<double>(j, "r_max", ctx);
  d.validate();
  return d;
}

Json to_json(const NormStats& stats) { return Json{{"mean", stats.mean}, {"stddev", stats.stddev}}; }

NormStats norm_stats_from_json(const Json& j)
{
  reject_unknown_keys(j, {"mean", "stddev", "fingerprint"}, "norm stats");
  NormStats s;
  s.mean = double_array(j, "mean", "norm stats");
  s.stddev = double_array(j, "stddev", "norm stats");
  if (s.mean.size() != s.stddev.size() || s.mean.empty())
    throw ValidationError("norm stats arrays must be non-empty and of equal length");
  for (double v : s.stddev)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("norm stats stddev entries must be finite and >= 0");
  return s;
}

Json to_json(const IsothermParams& params)
{
  const auto& v = params.values();
  return Json(std::vector<double>(v.begin(), v.end()));
}

IsothermParams isotherm_params_from_json(const Json& j)
{
  if (!j.is_array())
    throw ValidationError("isotherm parameters must be an array of 8 numbers");
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("isotherm parameters: ") + e.what());
  }
  return IsothermParams(std::span<const double>(v));
}

Json to_json(const FnnModel& model, const std::string& norm_fingerprint)
{
  Json weights = Json::array();
  Json biases = Json::array();
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto& w = model.weight(l);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        row[static_cast<std::size_t>(c)] = w(r, c);
      rows.push_back(std::move(row));
    }
    weights.push_back(std::move(rows));
    const auto& b = model.bias(l);
    biases.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  return Json{{"format", "chromainv-fnn"},
              {"format_version", 1},
              {"layer_sizes", model.layer_sizes()},
              {"activation", to_string(model.activation())},
              {"output_scale", FnnModel::output_scale},
              {"weights", std::move(weights)},
              {"biases", std::move(biases)},
              {"norm_fingerprint", norm_fingerprint}};
}

FnnModel fnn_model_from_json(const Json& j, std::string* norm_fingerprint)
{
  constexpr std::string_view ctx = "model";
  reject_unknown_keys(j,
                      {"format", "format_version", "layer_sizes", "activation", "output_scale", "weights", "biases",
                       "norm_fingerprint"},
                      ctx);
  if (get_as<int>(j, "format_version", ctx) != 1)
    throw ValidationError("unsupported model format version");
  if (get_as<double>(j, "output_scale", ctx) != FnnModel::output_scale)
    throw ValidationError("model output_scale must be 100");
  FnnModel model(get_as<std::vector<int>>(j, "layer_sizes", ctx),
                 parse_activation(get_as<std::string>(j, "activation", ctx)));
  const auto weights = get_as<std::vector<std::vector<std::vector<double>>>>(j, "weights", ctx);
  const auto biases = get_as<std::vector<std::vector<double>>>(j, "biases", ctx);
  if (weights.size() != model.layer_count() || biases.size() != model.layer_count())
    throw ValidationError("model layer count does not match layer_sizes");
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    auto& w = model.weight(l);
    auto& b = model.bias(l);
    if (weights[l].size() != static_cast<std::size_t>(w.rows()) || biases[l].size() != static_cast<std::size_t>(b.size()))
      throw ValidationError("model layer " + std::to_string(l + 1) + " has the wrong shape");
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const auto& row = weights[l][static_cast<std::size_t>(r)];
      if (row.size() != static_cast<std::size_t>(w.cols()))
        throw ValidationError("model layer " + std::to_string(l + 1) + " has the wrong shape");
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = row[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index i = 0; i < b.size(); ++i)
      b(i) = biases[l][static_cast<std::size_t>(i)];
  }
  if (norm_fingerprint)
    *norm_fingerprint = get_as<std::string>(j, "norm_fingerprint", ctx);
  return model;
}

Json to_json(const TrainConfig& c)
{
  return Json{{"loss_norm", to_string(c.loss_norm)},
              {"alpha_w", c.alpha_w},
              {"alpha_b", c.alpha_b},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"seed", c.seed},
              {"patience", c.patience},
              {"optimizer", to_string(c.optimizer)}};
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c)
{
  constexpr std::string_view ctx = "training";
  reject_unknown_keys(j,
                      {"loss_norm", "alpha_w", "alpha_b", "epochs", "batch_size", "learning_rate", "seed", "patience",
                       "optimizer"},
                      ctx);
  if (j.contains("loss_norm"))
    c.loss_norm = parse_loss_norm(get_as<std::string>(j, "loss_norm", ctx));
  if (j.contains("alpha_w"))
    c.alpha_w = get_as<double>(j, "alpha_w", ctx);
  if (j.contains("alpha_b"))
    c.alpha_b = get_as<double>(j, "alpha_b", ctx);
  if (j.contains("epochs"))
    c.epochs = get_as<int>(j, "epochs", ctx);
  if (j.contains("batch_size"))
    c.batch_size = get_as<int>(j, "batch_size", ctx);
  if (j.contains("learning_rate"))
    c.learning_rate = get_as<double>(j, "learning_rate", ctx);
  if (j.contains("seed"))
    c.seed = get_as<std::uint64_t>(j, "seed", ctx);
  if (j.contains("patience"))
    c.patience = get_as<int>(j, "patience", ctx);
  if (j.contains("optimizer"))
    c.optimizer = parse_optimizer(get_as<std::string>(j, "optimizer", ctx));
  c.validate();
  return c;
}

Json to_json(const Hyperparams& hp)
{
  return Json{{"hidden", hp.hidden},
              {"loss_norm", to_string(hp.loss_norm)},
              {"activation", to_string(hp.activation)},
              {"alpha_b", hp.alpha_b},
              {"alpha_w", hp.alpha_w}};
}

Hyperparams hyperparams_from_json(const Json& j, Hyperparams hp)
{
  constexpr std::string_view ctx = "model";
  reject_unknown_keys(j, {"hidden", "loss_norm", "activation", "alpha_b", "alpha_w"}, ctx);
  if (j.contains("hidden"))
    hp.hidden = get_as<std::vector<int>>(j, "hidden", ctx);
  if (j.contains("loss_norm"))
    hp.loss_norm = parse_loss_norm(get_as<std::string>(j, "loss_norm", ctx));
  if (j.contains("activation"))
    hp.activation = parse_activation(get_as<std::string>(j, "activation", ctx));
  if (j.contains("alpha_b"))
    hp.alpha_b = get_as<double>(j, "alpha_b", ctx);
  if (j.contains("alpha_w"))
    hp.alpha_w = get_as<double>(j, "alpha_w", ctx);
  if (hp.hidden.empty() || std::any_of(hp.hidden.begin(), hp.hidden.end(), [](int s) { return s <= 0; }))
    throw ValidationError("model.hidden needs at least one positive layer size");
  if (!(hp.alpha_b >= 0.0) || !(hp.alpha_w >= 0.0))
    throw ValidationError("model.alpha_b and model.alpha_w must be >= 0");
  return hp;
}

Json to_json(const GridSpace& g)
{
  Json norms = Json::array();
  for (auto n : g.loss_norms)
    norms.push_back(to_string(n));
  Json acts = Json::array();
  for (auto a : g.activations)
    acts.push_back(to_string(a));
  return Json{{"hidden", g.hidden},
              {"loss_norms", norms},
              {"activations", acts},
              {"alpha_b", g.alpha_b},
              {"alpha_w", g.alpha_w}};
}

GridSpace grid_space_from_json(const Json& j)
{
  constexpr std::string_view ctx = "grid";
  reject_unknown_keys(j, {"hidden", "loss_norms", "activations", "alpha_b", "alpha_w"}, ctx);
  GridSpace g = GridSpace::standard();
  if (j.contains("hidden"))
    g.hidden = get_as<std::vector<std::vector<int>>>(j, "hidden", ctx);
  if (j.contains("loss_norms")) {
    g.loss_norms.clear();
    for (const auto& s : get_as<std::vector<std::string>>(j, "loss_norms", ctx))
      g.loss_norms.push_back(parse_loss_norm(s));
  }
  if (j.contains("activations")) {
    g.activations.clear();
    for (const auto& s : get_as<std::vector<std::string>>(j, "activations", ctx))
      g.activations.push_back(parse_activation(s));
  }
  if (j.contains("alpha_b"))
    g.alpha_b = get_as<std::vector<double>>(j, "alpha_b", ctx);
  if (j.contains("alpha_w"))
    g.alpha_w = get_as<std::vector<double>>(j, "alpha_w", ctx);
  g.validate();
  return g;
}

Json to_json(const VariationalConfig& c)
{
  return Json{{"alpha", c.alpha},
              {"upper", c.upper},
              {"initial", to_json(c.initial)},
              {"max_iterations", c.max_iterations},
              {"tolerance", c.tolerance},
              {"initial_step", c.initial_step},
              {"restarts", c.restarts}};
}

VariationalConfig variational_config_from_json(const Json& j, VariationalConfig c)
{
  constexpr std::string_view ctx = "variational";
  reject_unknown_keys(j, {"alpha", "upper", "initial", "max_iterations", "tolerance", "initial_step", "restarts"},
                      ctx);
  if (j.contains("alpha"))
    c.alpha = get_as<double>(j, "alpha", ctx);
  if (j.contains("upper")) {
    const auto u = get_as<std::vector<double>>(j, "upper", ctx);
    if (u.size() != IsothermParams::size)
      throw ValidationError("variational.upper must have 8 entries");
    std::copy(u.begin(), u.end(), c.upper.begin());
  }
  if (j.contains("initial"))
    c.initial = isotherm_params_from_json(j.at("initial"));
  if (j.contains("max_iterations"))
    c.max_iterations = get_as<int>(j, "max_iterations", ctx);
  if (j.contains("tolerance"))
    c.tolerance = get_as<double>(j, "tolerance", ctx);
  if (j.contains("initial_step"))
    c.initial_step = get_as<double>(j, "initial_step", ctx);
  if (j.contains("restarts"))
    c.restarts = get_as<int>(j, "restarts", ctx);
  c.validate();
  return c;
}

Json to_json(const FitResult& r)
{
  Json per = Json::array();
  for (std::size_t s = 0; s < r.terms.data_per_observation.size(); ++s)
    per.push_back(Json{{"data", r.terms.data_per_observation[s]}, {"moment", r.terms.moment_per_observation[s]}});
  return Json{{"estimate", to_json(r.estimate)},
              {"objective", r.terms.total},
              {"data_term", r.terms.data},
              {"moment_term", r.terms.moment},
              {"per_observation", per},
              {"iterations", r.iterations},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"trace", r.trace}};
}

void write_json_file(const std::filesystem::path& path, const Json& j)
{
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path)
{
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

} // namespace chromainv
