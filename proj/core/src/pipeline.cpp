#include "chromainv/pipeline.hpp"

#include "chromainv/error.hpp"
#include "chromainv/interpolation.hpp"
#include "chromainv/random.hpp"

namespace chromainv {
namespace {

Eigen::MatrixXd target_matrix(std::span<const Sample> samples)
{
  Eigen::MatrixXd y(IsothermParams::size, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].target)
      throw ValidationError("sample " + std::to_string(k) + " has no target");
    const auto& v = samples[k].target->values();
    for (std::size_t j = 0; j < v.size(); ++j)
      y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v[j];
  }
  return y;
}

EvalReport report_from(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets)
{
  EvalReport r;
  r.samples = static_cast<std::size_t>(targets.cols());
  r.r2 = r_squared(predictions, targets);
  const Eigen::VectorXd per = r_squared_per_output(predictions, targets);
  r.per_entry.assign(per.data(), per.data() + per.size());
  return r;
}

} // namespace

TrainRun run_training(const Dataset& dataset, const TrainRunOptions& options)
{
  options.split.validate();
  options.cfg.validate();
  if (options.augment_shift < 0)
    throw ValidationError("augment_shift must be >= 0");

  TrainRun run;
  std::vector<Sample> synthetic;
  std::vector<Sample> real;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const Sample& s = dataset.samples[i];
    if (s.origin == Origin::real) {
      run.real_index.push_back(i);
      real.push_back(s);
    } else {
      run.synthetic_index.push_back(i);
      synthetic.push_back(s);
    }
  }

  Rng split_rng = make_stream(options.seed, "split");
  run.plan = split(synthetic.size(), real.size(), options.split, split_rng);

  if (options.augment_shift > 0) {
    // Shift every synthetic sample that can reach training or validation,
    // in index order so the draws do not depend on the split order.
    std::vector<bool> fit_side(synthetic.size(), false);
    for (std::size_t i : run.plan.train)
      fit_side[i] = true;
    for (std::size_t i : run.plan.validation)
      fit_side[i] = true;
    std::uniform_int_distribution<int> lag(-options.augment_shift, options.augment_shift);
    Rng rng = make_stream(options.seed, "augment");
    for (std::size_t i = 0; i < synthetic.size(); ++i) {
      if (!fit_side[i])
        continue;
      const int tau = lag(rng);
      run.augment_shifts.push_back(tau);
      synthetic[i].response = shift_series(synthetic[i].response, tau);
    }
  }

  run.sets = materialize(run.plan, synthetic, real);
  run.stats = fit_norm(run.sets.train);
  const Batch train_batch = make_batch(run.sets.train, run.stats);
  const Batch val_batch = make_batch(run.sets.validation, run.stats);
  const FnnModel init = initial_model(options.hp, static_cast<int>(train_batch.inputs.rows()),
                                      static_cast<int>(IsothermParams::size), options.cfg.seed);
  run.result = train(init, train_batch, val_batch, with_hyperparams(options.cfg, options.hp));

  run.train = report_from(run.result.model.forward(train_batch.inputs), train_batch.targets);
  if (val_batch.size() >= 2)
    run.validation = report_from(run.result.model.forward(val_batch.inputs), val_batch.targets);
  if (run.sets.test.size() >= 2)
    run.test = evaluate(run.result.model, run.stats, run.sets.test);
  return run;
}

EvalReport evaluate(const FnnModel& model, const NormStats& stats, std::span<const Sample> samples,
                    const std::optional<NoiseSpec>& noise, std::uint64_t seed)
{
  if (noise)
    validate(*noise);
  std::vector<Sample> used;
  used.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (noise) {
      Rng rng = make_stream(seed, "noise", k);
      used.push_back(corrupt(samples[k], *noise, rng));
    } else {
      used.push_back(samples[k]);
    }
  }
  const Eigen::MatrixXd x = feature_matrix(used, stats);
  return report_from(model.forward(x), target_matrix(used));
}

std::vector<Sample> regrid_samples(std::span<const Sample> samples, std::span<const double> from_grid,
                                   std::span<const double> grid)
{
  std::vector<Sample> out;
  out.reserve(samples.size());
  const std::vector<double> source(from_grid.begin(), from_grid.end());
  for (const auto& s : samples) {
    if (s.response.size() != source.size())
      throw ValidationError("sample response does not match its time grid");
    Sample r = s;
    r.response = regrid(Chromatogram{source, s.response}, grid).response;
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace chromainv
