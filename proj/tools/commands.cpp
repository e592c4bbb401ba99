#include "commands.hpp"

#include "chromainv/dataset.hpp"
#include "chromainv/error.hpp"
#include "chromainv/interpolation.hpp"
#include "chromainv/io.hpp"
#include "chromainv/noise.hpp"
#include "chromainv/pipeline.hpp"
#include "chromainv/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

namespace chromainv::cli {
namespace {

namespace fs = std::filesystem;

const std::array<const char*, IsothermParams::size> kParamNames{"a_I1", "b_I1", "a_II1", "b_II1",
                                                                "a_I2", "b_I2", "a_II2", "b_II2"};

void make_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_config_echo(const fs::path& dir, const RunConfig& cfg, const Invocation& inv, Json extra = {})
{
  Json j{{"command", inv.command}, {"args", inv.args}, {"config", to_json(cfg)}};
  if (!extra.is_null())
    j["options"] = std::move(extra);
  write_json_file(dir / "config.json", j);
}

Json eval_to_json(const EvalReport& r)
{
  Json per = Json::object();
  for (std::size_t j = 0; j < r.per_entry.size(); ++j)
    per[kParamNames[j]] = r.per_entry[j];
  return Json{{"r2", r.r2}, {"per_entry", per}, {"samples", r.samples}};
}

void write_eval_csv(const fs::path& path, const EvalReport& r)
{
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  os << "entry,r2\n";
  os << "overall," << format_number(r.r2) << '\n';
  for (std::size_t j = 0; j < r.per_entry.size(); ++j)
    os << kParamNames[j] << ',' << format_number(r.per_entry[j]) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

std::vector<std::size_t> to_dataset_index(const std::vector<std::size_t>& local, const std::vector<std::size_t>& map)
{
  std::vector<std::size_t> out;
  out.reserve(local.size());
  for (std::size_t i : local)
    out.push_back(map[i]);
  return out;
}

bool same_grid(const std::vector<double>& a, const std::vector<double>& b)
{
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(b[i])))
      return false;
  return true;
}

std::array<double, 2> injection_pair(const std::vector<double>& v)
{
  if (v.size() != 2)
    throw ValidationError("injection needs two concentrations");
  if (!(v[0] >= 0.0) || !(v[1] >= 0.0) || !std::isfinite(v[0]) || !std::isfinite(v[1]))
    throw ValidationError("injection concentrations must be finite and >= 0");
  return {v[0], v[1]};
}

double parse_double(std::string_view s, std::string_view what)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ValidationError("bad number '" + std::string(s) + "' in " + std::string(what));
  return v;
}

// "PATH:H1:H2" -> observation with the column's injection duration.
Observation parse_observation(const std::string& spec, double duration)
{
  const auto last = spec.rfind(':');
  const auto mid = last == std::string::npos || last == 0 ? std::string::npos : spec.rfind(':', last - 1);
  if (mid == std::string::npos)
    throw ValidationError("observation '" + spec + "' must be PATH:H1:H2");
  Observation obs;
  obs.injection = InjectionProfile{parse_double(std::string_view(spec).substr(mid + 1, last - mid - 1), spec),
                                   parse_double(std::string_view(spec).substr(last + 1), spec), duration};
  obs.injection.validate();
  obs.chromatogram = read_chromatogram_csv(spec.substr(0, mid));
  return obs;
}

std::vector<Observation> load_observations(const RunConfig& cfg, const VariationalArgs& args)
{
  if (args.observations.empty())
    throw ValidationError("at least one --obs PATH:H1:H2 is required");
  std::vector<Observation> obs;
  for (const auto& spec : args.observations)
    obs.push_back(parse_observation(spec, cfg.column.injection_duration));
  return obs;
}

ColumnConfig fit_column(const RunConfig& cfg, const VariationalArgs& args)
{
  ColumnConfig c = cfg.column;
  c.n_cells = args.fit_cells;
  c.validate();
  return c;
}

void write_trace_csv(const fs::path& path, const std::vector<double>& trace)
{
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  os << "iteration,best_objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << i << ',' << format_number(trace[i]) << '\n';
  if (!os)
    throw IoError("failed writing " + path.string());
}

struct ModelDir {
  FnnModel model;
  NormStats stats;
  Json info;
  std::vector<double> time_grid;
};

ModelDir load_model_dir(const fs::path& dir)
{
  ModelDir m;
  m.stats = load_norm_stats(dir / "norm_stats.json");
  m.model = load_model(dir / "model.json", m.stats);
  m.info = read_json_file(dir / "train_info.json");
  m.time_grid = m.info.at("time_grid").get<std::vector<double>>();
  if (m.time_grid.size() + 2 != m.stats.size())
    throw ValidationError(dir.string() + ": time grid does not match the normalization statistics");
  return m;
}

} // namespace

void cmd_generate(const RunConfig& cfg, const GenerateArgs& args, const Invocation& inv)
{
  if (cfg.n == 0)
    throw ValidationError("dataset size must be >= 1");
  GenerateOptions opt;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  opt.canonical_sites = cfg.canonical_sites;
  const Dataset ds = generate(cfg.n, cfg.column, cfg.detector, opt);

  save_dataset(args.out, ds);
  write_config_echo(args.out, cfg, inv, Json{{"plot_data", args.plot_data}});
  if (!args.plot_data)
    return;

  // Figure-style sample: four random samples (all when n < 4).
  std::vector<std::size_t> idx(ds.samples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = make_stream(cfg.seed, "plot");
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min<std::size_t>(4, idx.size()));
  std::sort(idx.begin(), idx.end());
  make_dir(args.out / "plot");
  for (std::size_t k : idx)
    write_chromatogram_csv(args.out / "plot" / ("sample_" + std::to_string(k) + ".csv"),
                           Chromatogram{ds.meta.time_grid, ds.samples[k].response});
}

void cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, const Invocation& inv)
{
  const IsothermParams params{std::span<const double>(args.params)};
  const auto h = injection_pair(args.injection);
  const InjectionProfile profile{h[0], h[1], cfg.column.injection_duration};
  const OutletSeries outlet = simulate(cfg.column, params, profile);
  make_dir(args.out);
  write_outlet_csv(args.out / "outlet.csv", outlet);
  write_chromatogram_csv(args.out / "chromatogram.csv", total_response(outlet, cfg.detector));
  write_json_file(args.out / "mass.json", Json{{"horizon", outlet.horizon},
                                               {"steps", outlet.steps},
                                               {"injected", outlet.injected},
                                               {"eluted", outlet.eluted},
                                               {"retained", outlet.retained}});
  write_config_echo(args.out, cfg, inv,
                    Json{{"params", to_json(params)}, {"injection", {h[0], h[1]}}});
}

void cmd_train(const RunConfig& cfg, const TrainArgs& args, const Invocation& inv)
{
  const Dataset ds = load_dataset(args.data);
  TrainRunOptions opt;
  opt.split = cfg.split;
  opt.hp = cfg.model;
  opt.cfg = cfg.training;
  opt.augment_shift = args.augment_shift;
  opt.seed = cfg.seed;
  const TrainRun run = run_training(ds, opt);

  make_dir(args.out);
  save_model(args.out / "model.json", run.result.model, run.stats);
  save_norm_stats(args.out / "norm_stats.json", run.stats);
  write_history_csv(args.out / "history.csv", run.result.history);
  write_json_file(args.out / "split.json",
                  Json{{"train", to_dataset_index(run.plan.train, run.synthetic_index)},
                       {"validation", to_dataset_index(run.plan.validation, run.synthetic_index)},
                       {"test", to_dataset_index(run.plan.test, run.synthetic_index)},
                       {"real_train", to_dataset_index(run.plan.real_train, run.real_index)},
                       {"real_validation", to_dataset_index(run.plan.real_validation, run.real_index)},
                       {"counts",
                        {{"train", run.sets.train.size()},
                         {"validation", run.sets.validation.size()},
                         {"test", run.sets.test.size()}}}});
  Json metrics{{"best_epoch", run.result.best_epoch},
               {"epochs_run", run.result.history.size()},
               {"train", eval_to_json(run.train)}};
  if (run.sets.validation.size() >= 2)
    metrics["validation"] = eval_to_json(run.validation);
  if (run.sets.test.size() >= 2)
    metrics["test"] = eval_to_json(run.test);
  write_json_file(args.out / "metrics.json", metrics);
  write_json_file(args.out / "train_info.json",
                  Json{{"dataset", args.data.string()},
                       {"dataset_fingerprint", dataset_fingerprint(ds)},
                       {"time_grid", ds.meta.time_grid},
                       {"augment_shift", args.augment_shift},
                       {"augment_shifts", run.augment_shifts}});
  write_config_echo(args.out, cfg, inv,
                    Json{{"data", args.data.string()}, {"augment_shift", args.augment_shift}});

  std::cout << "train R2 " << format_number(run.train.r2);
  if (run.sets.validation.size() >= 2)
    std::cout << "  validation R2 " << format_number(run.validation.r2);
  if (run.sets.test.size() >= 2)
    std::cout << "  test R2 " << format_number(run.test.r2);
  std::cout << "  (best epoch " << run.result.best_epoch << ")\n";
}

void cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args, const Invocation& inv)
{
  const ModelDir m = load_model_dir(args.model);
  const Dataset ds = load_dataset(args.data);
  std::optional<NoiseSpec> noise;
  if (args.noise)
    noise = parse_noise_spec(*args.noise);

  std::string subset = args.subset;
  if (subset == "auto")
    subset = m.info.value("dataset_fingerprint", "") == dataset_fingerprint(ds) ? "test" : "all";
  std::vector<Sample> samples;
  if (subset == "all") {
    samples = ds.samples;
  } else if (subset == "train" || subset == "validation" || subset == "test") {
    const Json split = read_json_file(args.model / "split.json");
    if (m.info.value("dataset_fingerprint", "") != dataset_fingerprint(ds))
      throw ValidationError("subset '" + subset + "' needs the dataset the model was trained on");
    auto add = [&](const char* key) {
      for (std::size_t i : split.at(key).get<std::vector<std::size_t>>())
        samples.push_back(ds.samples.at(i));
    };
    add(subset.c_str());
    if (subset != "test")
      add(subset == "train" ? "real_train" : "real_validation");
  } else {
    throw ValidationError("unknown subset '" + subset + "' (auto, all, train, validation, test)");
  }

  if (!same_grid(ds.meta.time_grid, m.time_grid)) {
    if (!args.regrid)
      throw ValidationError("dataset time grid differs from the model's; pass --regrid to resample");
    samples = regrid_samples(samples, ds.meta.time_grid, m.time_grid);
  }
  const EvalReport r = evaluate(m.model, m.stats, samples, noise, cfg.seed);

  make_dir(args.out);
  Json j = eval_to_json(r);
  j["subset"] = subset;
  j["noise"] = noise ? Json(to_string(*noise)) : Json(nullptr);
  write_json_file(args.out / "r2.json", j);
  write_eval_csv(args.out / "r2.csv", r);
  write_config_echo(args.out, cfg, inv,
                    Json{{"model", args.model.string()},
                         {"data", args.data.string()},
                         {"subset", subset},
                         {"noise", j["noise"]},
                         {"regrid", args.regrid}});
  std::cout << "R2 " << format_number(r.r2) << " on " << r.samples << " samples (" << subset
            << (noise ? ", " + to_string(*noise) : std::string()) << ")\n";
}

void cmd_predict(const RunConfig& /*cfg*/, const PredictArgs& args)
{
  const ModelDir m = load_model_dir(args.model);
  Chromatogram c = read_chromatogram_csv(args.chromatogram);
  if (!same_grid(c.time, m.time_grid))
    c = regrid(c, m.time_grid);
  Sample s;
  s.response = c.response;
  s.injection = injection_pair(args.injection);
  const IsothermParams y = predict(m.model, m.stats, s);

  for (std::size_t j = 0; j < IsothermParams::size; ++j)
    std::cout << kParamNames[j] << ' ' << format_number(y[j]) << '\n';
  if (args.out) {
    Json names = Json::array();
    for (const char* n : kParamNames)
      names.push_back(n);
    write_json_file(*args.out, Json{{"order", names}, {"estimate", to_json(y)}});
  }
}

void cmd_fit_variational(const RunConfig& cfg, const VariationalArgs& args, const Invocation& inv)
{
  const std::vector<Observation> obs = load_observations(cfg, args);
  const ColumnConfig column = fit_column(cfg, args);
  VariationalConfig vc = cfg.variational;
  vc.threads = cfg.threads;
  const FitResult r = fit(obs, column, cfg.detector, vc);

  make_dir(args.out);
  Json report = to_json(r);
  report["config"] = to_json(vc);
  report["column"] = to_json(column);
  report["observations"] = args.observations;
  write_json_file(args.out / "fit_report.json", report);
  write_trace_csv(args.out / "trace.csv", r.trace);
  write_config_echo(args.out, cfg, inv, Json{{"observations", args.observations}, {"fit_cells", args.fit_cells}});

  for (std::size_t j = 0; j < IsothermParams::size; ++j)
    std::cout << kParamNames[j] << ' ' << format_number(r.estimate[j]) << '\n';
  std::cout << "objective " << format_number(r.terms.total) << " after " << r.iterations << " iterations"
            << (r.converged ? "" : " (iteration cap reached)") << '\n';
}

void cmd_alpha_sweep(const RunConfig& cfg, const VariationalArgs& args, const Invocation& inv)
{
  const std::vector<Observation> obs = load_observations(cfg, args);
  const ColumnConfig column = fit_column(cfg, args);
  const auto first = args.alphas.find(':');
  const auto second = first == std::string::npos ? std::string::npos : args.alphas.find(':', first + 1);
  if (second == std::string::npos)
    throw ValidationError("--alphas must be LO:HI:N");
  const std::string_view a(args.alphas);
  const double lo = parse_double(a.substr(0, first), "--alphas");
  const double hi = parse_double(a.substr(first + 1, second - first - 1), "--alphas");
  const double n = parse_double(a.substr(second + 1), "--alphas");
  if (n != std::floor(n) || n < 1)
    throw ValidationError("--alphas count must be a positive integer");
  const std::vector<double> alphas = log_grid(lo, hi, static_cast<int>(n));

  VariationalConfig vc = cfg.variational;
  vc.threads = cfg.threads;
  const auto rows = alpha_sweep(obs, column, cfg.detector, vc, alphas);

  make_dir(args.out);
  std::ofstream os(args.out / "alpha_sweep.csv");
  if (!os)
    throw IoError("cannot write " + (args.out / "alpha_sweep.csv").string());
  os << "alpha,data_term,moment_term,objective,iterations,converged";
  for (const char* name : kParamNames)
    os << ',' << name;
  os << '\n';
  for (const auto& row : rows) {
    os << format_number(row.alpha) << ',' << format_number(row.fit.terms.data) << ','
       << format_number(row.fit.terms.moment) << ',' << format_number(row.fit.terms.total) << ','
       << row.fit.iterations << ',' << (row.fit.converged ? 1 : 0);
    for (double y : row.fit.estimate.values())
      os << ',' << format_number(y);
    os << '\n';
  }
  if (!os)
    throw IoError("failed writing alpha_sweep.csv");
  write_config_echo(args.out, cfg, inv,
                    Json{{"observations", args.observations}, {"fit_cells", args.fit_cells}, {"alphas", args.alphas}});
}

void cmd_cross_validate(const RunConfig& cfg, const DataArgs& args, const Invocation& inv)
{
  const Dataset ds = load_dataset(args.data);
  std::vector<Sample> synthetic;
  std::vector<Sample> real;
  for (const auto& s : ds.samples)
    (s.origin == Origin::real ? real : synthetic).push_back(s);
  const CvReport r =
      cross_validate(synthetic, real, cfg.model, cfg.training, cfg.cv_folds, cfg.split.real_ratio, cfg.threads);
  make_dir(args.out);
  write_cv_csv(args.out / "cv.csv", r);
  write_config_echo(args.out, cfg, inv, Json{{"data", args.data.string()}});
  std::cout << "mean validation R2 " << format_number(r.mean_val_r2) << " over " << r.folds.size() << " folds\n";
}

void cmd_grid_search(const RunConfig& cfg, const DataArgs& args, const Invocation& inv)
{
  const Dataset ds = load_dataset(args.data);
  std::vector<Sample> synthetic;
  std::vector<Sample> real;
  for (const auto& s : ds.samples)
    (s.origin == Origin::real ? real : synthetic).push_back(s);
  Rng rng = make_stream(cfg.seed, "split");
  const SplitPlan plan = split(synthetic.size(), real.size(), cfg.split, rng);
  const SplitSets sets = materialize(plan, synthetic, real);
  const NormStats stats = fit_norm(sets.train);
  const GridReport report = grid_search(cfg.grid, make_batch(sets.train, stats), make_batch(sets.validation, stats),
                                        cfg.training, cfg.threads);
  make_dir(args.out);
  write_grid_csv(args.out / "grid_all.csv", report.rows);
  write_grid_csv(args.out / "grid_top.csv", report.top);
  write_config_echo(args.out, cfg, inv, Json{{"data", args.data.string()}});
  std::cout << report.rows.size() << " combinations trained; best validation R2 "
            << format_number(report.top.empty() ? 0.0 : std::max_element(report.top.begin(), report.top.end(),
                                                                          [](const GridRow& a, const GridRow& b) {
                                                                            return a.val_r2 < b.val_r2;
                                                                          })->val_r2)
            << '\n';
}

} // namespace chromainv::cli
