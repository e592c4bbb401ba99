#include "commands.hpp"

#include "chromainv/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace chromainv;
using namespace chromainv::cli;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Flags that override config values; unset flags leave the config alone.
struct Overrides {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t n = 0;
  bool no_canonical_sites = false;
  int n_cells = 0;
  double horizon = 0.0;
  int n_time_points = 0;
  std::string hidden;
  std::string activation;
  std::string loss;
  double alpha_w = 0.0;
  double alpha_b = 0.0;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::string optimizer;
  int patience = 0;
  int k = 0;
  double alpha = 0.0;
  int max_iterations = 0;

  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <class T, class Apply>
  CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help, Apply apply)
  {
    CLI::Option* opt = app->add_option(name, target, help);
    setters.emplace_back(opt, apply);
    return opt;
  }

  void apply(RunConfig& cfg) const
  {
    for (const auto& [opt, set] : setters)
      if (opt->count() > 0)
        set(cfg);
  }
};

void add_column_flags(CLI::App* app, Overrides& o)
{
  o.add(app, "--cells", o.n_cells, "Spatial cells of the solver", [&o](RunConfig& c) { c.column.n_cells = o.n_cells; });
  o.add(app, "--horizon", o.horizon, "Simulated horizon T in s",
        [&o](RunConfig& c) { c.column.horizon = o.horizon; });
  o.add(app, "--n-time-points", o.n_time_points, "Output grid size N_T",
        [&o](RunConfig& c) { c.column.n_time_points = o.n_time_points; });
}

void add_model_flags(CLI::App* app, Overrides& o)
{
  o.add(app, "--hidden", o.hidden, "Hidden layer sizes, e.g. 64,48",
        [&o](RunConfig& c) { c.model.hidden = parse_hidden(o.hidden); });
  o.add(app, "--activation", o.activation, "sigmoid or tanh",
        [&o](RunConfig& c) { c.model.activation = parse_activation(o.activation); });
  o.add(app, "--loss", o.loss, "L1 or L2", [&o](RunConfig& c) { c.model.loss_norm = parse_loss_norm(o.loss); });
  o.add(app, "--alpha-w", o.alpha_w, "Weight regularization", [&o](RunConfig& c) { c.model.alpha_w = o.alpha_w; });
  o.add(app, "--alpha-b", o.alpha_b, "Bias regularization", [&o](RunConfig& c) { c.model.alpha_b = o.alpha_b; });
}

void add_training_flags(CLI::App* app, Overrides& o)
{
  o.add(app, "--epochs", o.epochs, "Maximum epochs", [&o](RunConfig& c) { c.training.epochs = o.epochs; });
  o.add(app, "--batch-size", o.batch_size, "Mini-batch size",
        [&o](RunConfig& c) { c.training.batch_size = o.batch_size; });
  o.add(app, "--learning-rate", o.learning_rate, "Step size",
        [&o](RunConfig& c) { c.training.learning_rate = o.learning_rate; });
  o.add(app, "--optimizer", o.optimizer, "sgd (default) or adam",
        [&o](RunConfig& c) { c.training.optimizer = parse_optimizer(o.optimizer); });
  o.add(app, "--patience", o.patience, "Early-stopping patience in epochs (0 disables)",
        [&o](RunConfig& c) { c.training.patience = o.patience; });
}

void add_variational_flags(CLI::App* app, Overrides& o, VariationalArgs& va)
{
  app->add_option("--obs", va.observations, "Observation PATH:H1:H2 (CSV t,response; injection in mM)")
      ->required();
  app->add_option("--fit-cells", va.fit_cells, "Solver cells used while fitting")->capture_default_str();
  o.add(app, "--max-iterations", o.max_iterations, "Nelder-Mead iteration cap",
        [&o](RunConfig& c) { c.variational.max_iterations = o.max_iterations; });
}

int run(int argc, char** argv)
{
  CLI::App app{"Bi-Langmuir isotherm estimation from chromatograms: simulation, synthetic data, "
               "neural-network inversion and variational fitting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "chromainv 0.1.0");

  std::string config_path;
  Overrides o;
  app.add_option("--config", config_path, "Structured JSON configuration")->check(CLI::ExistingFile);
  o.add(&app, "--seed", o.seed, "Master seed", [&o](RunConfig& c) {
    c.seed = o.seed;
    if (!c.training_seed_explicit)
      c.training.seed = o.seed;
  });
  o.add(&app, "--threads", o.threads, "Worker thread cap", [&o](RunConfig& c) { c.threads = o.threads; });

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  o.add(gen, "--n", o.n, "Number of samples", [&o](RunConfig& c) { c.n = o.n; });
  gen->add_option("--out", ga.out, "Output dataset directory")->required();
  gen->add_flag("--plot-data", ga.plot_data, "Also write four sample chromatograms as CSV");
  auto* no_canon = gen->add_flag("--no-canonical-sites", o.no_canonical_sites,
                                 "Store targets with i.i.d. site labels instead of canonical order");
  o.setters.emplace_back(no_canon, [](RunConfig& c) { c.canonical_sites = false; });
  add_column_flags(gen, o);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate one injection");
  sim->add_option("--params", sa.params, "Eight isotherm parameters a_I1 b_I1 a_II1 b_II1 a_I2 b_I2 a_II2 b_II2")
      ->required()
      ->expected(8)
      ->delimiter(',');
  sim->add_option("--injection", sa.injection, "Injected concentrations H1,H2 in mM")
      ->required()
      ->expected(2)
      ->delimiter(',');
  sim->add_option("--out", sa.out, "Output directory")->required();
  add_column_flags(sim, o);

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a network on a dataset");
  tr->add_option("--data", ta.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  tr->add_option("--out", ta.out, "Output model directory")->required();
  tr->add_option("--augment-shift", ta.augment_shift, "Shift-augment synthetic samples with lags in [-M, M]")
      ->check(CLI::NonNegativeNumber);
  add_model_flags(tr, o);
  add_training_flags(tr, o);

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Report overall and per-entry R^2");
  ev->add_option("--model", ea.model, "Model directory from train")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--data", ea.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--out", ea.out, "Output directory")->required();
  ev->add_option("--subset", ea.subset, "auto, all, train, validation or test")->capture_default_str();
  ev->add_option("--noise", ea.noise, "normal:M:S, uniform:LO:HI, poisson:L:D or shift:M");
  ev->add_flag("--regrid", ea.regrid, "Resample responses onto the model's time grid");

  PredictArgs pa;
  auto* pr = app.add_subcommand("predict", "Estimate isotherm parameters from one chromatogram");
  pr->add_option("--model", pa.model, "Model directory from train")->required()->check(CLI::ExistingDirectory);
  pr->add_option("--chromatogram", pa.chromatogram, "CSV with header t,response")->required();
  pr->add_option("--injection", pa.injection, "Injected concentrations H1,H2 in mM")
      ->required()
      ->expected(2)
      ->delimiter(',');
  pr->add_option("--out", pa.out, "Also write the estimate as JSON");

  VariationalArgs va;
  auto* fv = app.add_subcommand("fit-variational", "Weighted least-squares fit with first-moment regularization");
  fv->add_option("--out", va.out, "Output directory")->required();
  add_variational_flags(fv, o, va);
  o.add(fv, "--alpha", o.alpha, "Moment regularization parameter",
        [&o](RunConfig& c) { c.variational.alpha = o.alpha; });
  add_column_flags(fv, o);

  auto* sweep = app.add_subcommand("alpha-sweep", "Fit over a log grid of alpha values");
  sweep->add_option("--out", va.out, "Output directory")->required();
  sweep->add_option("--alphas", va.alphas, "LO:HI:N log grid")->capture_default_str();
  add_variational_flags(sweep, o, va);
  add_column_flags(sweep, o);

  DataArgs cva;
  auto* cv = app.add_subcommand("cross-validate", "k-fold cross-validation");
  cv->add_option("--data", cva.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cv->add_option("--out", cva.out, "Output directory")->required();
  o.add(cv, "--k", o.k, "Number of folds", [&o](RunConfig& c) { c.cv_folds = o.k; });
  add_model_flags(cv, o);
  add_training_flags(cv, o);

  DataArgs gsa;
  auto* gs = app.add_subcommand("grid-search", "Hyperparameter grid search (candidates from the config)");
  gs->add_option("--data", gsa.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  gs->add_option("--out", gsa.out, "Output directory")->required();
  add_training_flags(gs, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  o.apply(cfg);
  cfg.column.validate();
  if (cfg.cv_folds < 2)
    throw ValidationError("--k must be >= 2");

  const CLI::App* sub = app.get_subcommands().front();
  Invocation inv{sub->get_name(), std::vector<std::string>(argv + 1, argv + argc)};
  if (sub == gen)
    cmd_generate(cfg, ga, inv);
  else if (sub == sim)
    cmd_simulate(cfg, sa, inv);
  else if (sub == tr)
    cmd_train(cfg, ta, inv);
  else if (sub == ev)
    cmd_evaluate(cfg, ea, inv);
  else if (sub == pr)
    cmd_predict(cfg, pa);
  else if (sub == fv)
    cmd_fit_variational(cfg, va, inv);
  else if (sub == sweep)
    cmd_alpha_sweep(cfg, va, inv);
  else if (sub == cv)
    cmd_cross_validate(cfg, cva, inv);
  else if (sub == gs)
    cmd_grid_search(cfg, gsa, inv);
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const chromainv::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const chromainv::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const chromainv::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
