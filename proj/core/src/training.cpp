#include "chromainv/training.hpp"

#include "chromainv/error.hpp"
#include "chromainv/random.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace chromainv {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

std::uint64_t column_hash(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, Eigen::Index j)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    mix(inputs(i, j));
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    mix(targets(i, j));
  return h;
}

// Order of columns defined by their content alone.
std::vector<Eigen::Index> content_order(const Batch& batch)
{
  const Eigen::Index n = batch.size();
  std::vector<std::uint64_t> hash(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    hash[static_cast<std::size_t>(j)] = column_hash(batch.inputs, batch.targets, j);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto lexi_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < batch.inputs.rows(); ++i)
      if (batch.inputs(i, a) != batch.inputs(i, b))
        return batch.inputs(i, a) < batch.inputs(i, b);
    for (Eigen::Index i = 0; i < batch.targets.rows(); ++i)
      if (batch.targets(i, a) != batch.targets(i, b))
        return batch.targets(i, a) < batch.targets(i, b);
    return false;
  };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const auto ha = hash[static_cast<std::size_t>(a)];
    const auto hb = hash[static_cast<std::size_t>(b)];
    if (ha != hb)
      return ha < hb;
    return lexi_less(a, b);
  });
  return order;
}

Batch reorder(const Batch& batch, const std::vector<Eigen::Index>& order)
{
  return Batch{batch.inputs(Eigen::all, order), batch.targets(Eigen::all, order)};
}

class Updater {
public:
  Updater(const FnnModel& model, const TrainConfig& cfg) : cfg_(cfg)
  {
    if (cfg.optimizer == Optimizer::adam) {
      m_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
      v_ = m_;
    }
  }

  void step(FnnModel& model, const Gradient& g)
  {
    if (cfg_.optimizer == Optimizer::sgd) {
      for (std::size_t l = 0; l < model.layer_count(); ++l) {
        model.weight(l) -= cfg_.learning_rate * g.weights[l];
        model.bias(l) -= cfg_.learning_rate * g.biases[l];
      }
      return;
    }
    ++t_;
    const Eigen::VectorXd grad = g.flatten();
    m_ = kAdamBeta1 * m_ + (1.0 - kAdamBeta1) * grad;
    v_ = kAdamBeta2 * v_ + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kAdamBeta1, t_);
    const double c2 = 1.0 - std::pow(kAdamBeta2, t_);
    const Eigen::VectorXd step =
        (cfg_.learning_rate / c1) * m_.array() / ((v_.array() / c2).sqrt() + kAdamEpsilon);
    model.set_parameters(model.parameters() - step);
  }

private:
  const TrainConfig& cfg_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  int t_ = 0;
};

double safe_r2(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets)
{
  if (targets.cols() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  return r_squared(predictions, targets);
}

double data_term(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets, LossNorm norm)
{
  const Eigen::MatrixXd diff = predictions - targets;
  const double entries = static_cast<double>(diff.size());
  return norm == LossNorm::l2 ? diff.squaredNorm() / entries : diff.cwiseAbs().sum() / entries;
}

} // namespace

std::string to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

Optimizer parse_optimizer(std::string_view s)
{
  if (s == "sgd")
    return Optimizer::sgd;
  if (s == "adam")
    return Optimizer::adam;
  throw ValidationError("unknown optimizer '" + std::string(s) + "' (sgd, adam)");
}

void TrainConfig::validate() const
{
  if (!(alpha_w >= 0.0) || !(alpha_b >= 0.0) || !std::isfinite(alpha_w) || !std::isfinite(alpha_b))
    throw ValidationError("alpha_w and alpha_b must be finite and >= 0");
  if (epochs < 1)
    throw ValidationError("epochs must be >= 1");
  if (batch_size < 1)
    throw ValidationError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("learning_rate must be > 0");
  if (patience < 0)
    throw ValidationError("patience must be >= 0");
}

Eigen::MatrixXd feature_matrix(std::span<const Sample> samples, const NormStats& stats)
{
  if (samples.empty())
    return {};
  const auto m = static_cast<Eigen::Index>(stats.size());
  Eigen::MatrixXd x(m, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const std::vector<double> f = normalize(samples[k].features(), stats);
    x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(f.data(), m);
  }
  return x;
}

Batch make_batch(std::span<const Sample> samples, const NormStats& stats)
{
  Batch b;
  b.inputs = feature_matrix(samples, stats);
  b.targets.resize(IsothermParams::size, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].target)
      throw ValidationError("sample " + std::to_string(k) + " has no target");
    const auto& v = samples[k].target->values();
    for (std::size_t j = 0; j < v.size(); ++j)
      b.targets(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v[j];
  }
  return b;
}

TrainResult train(FnnModel model, const Batch& training, const Batch& validation, const TrainConfig& cfg)
{
  cfg.validate();
  if (training.size() == 0)
    throw ValidationError("training set is empty");
  if (training.inputs.rows() != model.input_size() || training.targets.rows() != model.output_size())
    throw ValidationError("training data does not match the model layer sizes");
  const bool has_validation = validation.size() > 0;
  if (has_validation &&
      (validation.inputs.rows() != model.input_size() || validation.targets.rows() != model.output_size()))
    throw ValidationError("validation data does not match the model layer sizes");

  const Batch data = reorder(training, content_order(training));
  const Eigen::Index n = data.size();
  const auto batch_size = std::min<Eigen::Index>(cfg.batch_size, n);

  Updater updater(model, cfg);
  TrainResult result;
  result.model = model;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> cols;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng = make_stream(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(perm.begin(), perm.end(), rng);

    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const Eigen::Index stop = std::min(n, start + batch_size);
      cols.assign(perm.begin() + start, perm.begin() + stop);
      const Batch mini{data.inputs(Eigen::all, cols), data.targets(Eigen::all, cols)};
      updater.step(model, gradients(model, mini, cfg.loss_norm, cfg.alpha_w, cfg.alpha_b));
    }

    const LossTerms terms = loss(model, data, cfg.loss_norm, cfg.alpha_w, cfg.alpha_b);
    if (!std::isfinite(terms.total))
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) + " (non-finite loss)");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = terms.total;
    rec.data_term = terms.data;
    rec.train_r2 = safe_r2(model.forward(data.inputs), data.targets);
    rec.val_r2 = std::numeric_limits<double>::quiet_NaN();
    double score = terms.data;
    if (has_validation) {
      const Eigen::MatrixXd pred = model.forward(validation.inputs);
      rec.val_r2 = safe_r2(pred, validation.targets);
      score = data_term(pred, validation.targets, cfg.loss_norm);
    }
    result.history.push_back(rec);

    if (!has_validation) {
      result.model = model;
      result.best_epoch = epoch;
      continue;
    }
    if (score < best) {
      best = score;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

std::string hidden_to_string(const std::vector<int>& hidden)
{
  std::string s = "(";
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(hidden[i]);
  }
  return s + ")";
}

std::vector<int> parse_hidden(std::string_view s)
{
  if (!s.empty() && s.front() == '(')
    s.remove_prefix(1);
  if (!s.empty() && s.back() == ')')
    s.remove_suffix(1);
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view tok = s.substr(0, comma);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0)
      throw ValidationError("bad hidden layer size '" + std::string(tok) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos)
      break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty())
    throw ValidationError("hidden structure needs at least one layer");
  return out;
}

FnnModel initial_model(const Hyperparams& hp, int input_size, int output_size, std::uint64_t seed)
{
  std::vector<int> sizes{input_size};
  sizes.insert(sizes.end(), hp.hidden.begin(), hp.hidden.end());
  sizes.push_back(output_size);
  Rng rng = make_stream(seed, "init");
  return FnnModel::initialized(std::move(sizes), hp.activation, rng);
}

TrainConfig with_hyperparams(TrainConfig base, const Hyperparams& hp)
{
  base.loss_norm = hp.loss_norm;
  base.alpha_b = hp.alpha_b;
  base.alpha_w = hp.alpha_w;
  return base;
}

GridSpace GridSpace::standard()
{
  GridSpace g;
  g.hidden = {{112}, {256}, {140, 112}, {140, 112, 84}};
  g.loss_norms = {LossNorm::l1, LossNorm::l2};
  g.activations = {Activation::sigmoid, Activation::tanh};
  g.alpha_b = {0.01, 0.001};
  g.alpha_w = {0.01, 0.001};
  return g;
}

std::size_t GridSpace::size() const
{
  return hidden.size() * loss_norms.size() * activations.size() * alpha_b.size() * alpha_w.size();
}

void GridSpace::validate() const
{
  if (hidden.empty() || loss_norms.empty() || activations.empty() || alpha_b.empty() || alpha_w.empty())
    throw ValidationError("every grid-search candidate list must be non-empty");
  for (const auto& h : hidden)
    if (h.empty() || std::any_of(h.begin(), h.end(), [](int s) { return s <= 0; }))
      throw ValidationError("hidden structures need positive layer sizes");
  for (double a : alpha_b)
    if (!(a >= 0.0))
      throw ValidationError("alpha_b candidates must be >= 0");
  for (double a : alpha_w)
    if (!(a >= 0.0))
      throw ValidationError("alpha_w candidates must be >= 0");
}

std::vector<Hyperparams> GridSpace::combinations() const
{
  std::vector<Hyperparams> out;
  out.reserve(size());
  for (const auto& h : hidden)
    for (LossNorm norm : loss_norms)
      for (Activation act : activations)
        for (double ab : alpha_b)
          for (double aw : alpha_w)
            out.push_back(Hyperparams{h, norm, act, ab, aw});
  return out;
}

std::vector<GridRow> rank_top_per_structure(const std::vector<GridRow>& rows, std::size_t per_structure)
{
  std::vector<std::vector<int>> structures;
  for (const auto& r : rows)
    if (std::find(structures.begin(), structures.end(), r.hp.hidden) == structures.end())
      structures.push_back(r.hp.hidden);

  auto better = [](const GridRow& a, const GridRow& b) {
    if (a.val_r2 != b.val_r2)
      return a.val_r2 > b.val_r2;
    if (a.train_r2 != b.train_r2)
      return a.train_r2 > b.train_r2;
    return a.order < b.order;
  };
  std::vector<GridRow> top;
  for (const auto& s : structures) {
    std::vector<GridRow> group;
    for (const auto& r : rows)
      if (r.hp.hidden == s)
        group.push_back(r);
    std::sort(group.begin(), group.end(), better);
    group.resize(std::min(group.size(), per_structure));
    top.insert(top.end(), group.begin(), group.end());
  }
  return top;
}

GridReport grid_search(const GridSpace& space, const Batch& training, const Batch& validation,
                       const TrainConfig& base, unsigned threads, std::size_t per_structure)
{
  space.validate();
  base.validate();
  if (validation.size() < 2)
    throw ValidationError("grid search needs at least two validation samples");
  const auto combos = space.combinations();
  GridReport report;
  report.rows.resize(combos.size());
  detail::parallel_for(combos.size(), threads, [&](std::size_t i) {
    const auto& hp = combos[i];
    const FnnModel init = initial_model(hp, static_cast<int>(training.inputs.rows()),
                                        static_cast<int>(training.targets.rows()), base.seed);
    const TrainResult fit = train(init, training, validation, with_hyperparams(base, hp));
    GridRow row;
    row.hp = hp;
    row.order = i;
    row.train_r2 = r_squared(fit.model.forward(training.inputs), training.targets);
    row.val_r2 = r_squared(fit.model.forward(validation.inputs), validation.targets);
    report.rows[i] = row;
  });
  report.top = rank_top_per_structure(report.rows, per_structure);
  return report;
}

std::vector<CvFoldPlan> cv_plan(std::size_t n_synthetic, std::size_t n_real, int k, double real_ratio,
                                std::uint64_t seed)
{
  if (k < 2)
    throw ValidationError("cross-validation needs k >= 2");
  if (n_synthetic < static_cast<std::size_t>(k))
    throw ValidationError("cross-validation needs at least k samples");
  if (n_real > 0 && n_real < kMinRealSamples)
    throw ValidationError("real-data mode needs at least 5 real samples, got " + std::to_string(n_real));

  std::vector<std::size_t> order(n_synthetic);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_stream(seed, "cv");
  std::shuffle(order.begin(), order.end(), rng);

  const auto kk = static_cast<std::size_t>(k);
  std::vector<CvFoldPlan> plan(kk);
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t lo = f * n_synthetic / kk;
    const std::size_t hi = (f + 1) * n_synthetic / kk;
    plan[f].validation.assign(order.begin() + static_cast<long>(lo), order.begin() + static_cast<long>(hi));
    std::sort(plan[f].validation.begin(), plan[f].validation.end());
    if (n_real == 0)
      continue;
    std::vector<std::size_t> reals(n_real);
    std::iota(reals.begin(), reals.end(), std::size_t{0});
    Rng real_rng = make_stream(seed, "cv-real", f);
    std::shuffle(reals.begin(), reals.end(), real_rng);
    const std::size_t n_train_real = n_real - kRealValidationCount;
    const std::size_t n_val_syn = hi - lo;
    const std::size_t n_train_syn = n_synthetic - n_val_syn;
    const std::size_t train_slots = real_slot_count(n_train_syn, n_train_real, real_ratio);
    const std::size_t val_slots = real_slot_count(n_val_syn, kRealValidationCount, real_ratio);
    for (std::size_t i = 0; i < train_slots; ++i)
      plan[f].real_train.push_back(reals[i % n_train_real]);
    for (std::size_t i = 0; i < val_slots; ++i)
      plan[f].real_validation.push_back(reals[n_train_real + i % kRealValidationCount]);
  }
  return plan;
}

CvReport cross_validate(std::span<const Sample> synthetic, std::span<const Sample> real, const Hyperparams& hp,
                        const TrainConfig& cfg, int k, double real_ratio, unsigned threads)
{
  cfg.validate();
  const auto plan = cv_plan(synthetic.size(), real.size(), k, real_ratio, cfg.seed);
  CvReport report;
  report.folds.resize(plan.size());

  detail::parallel_for(plan.size(), threads, [&](std::size_t f) {
    const auto& fold = plan[f];
    std::vector<bool> in_val(synthetic.size(), false);
    for (std::size_t i : fold.validation)
      in_val[i] = true;
    std::vector<Sample> train_side;
    std::vector<Sample> val_side;
    for (std::size_t i = 0; i < synthetic.size(); ++i)
      (in_val[i] ? val_side : train_side).push_back(synthetic[i]);
    for (std::size_t i : fold.real_train)
      train_side.push_back(real[i]);
    for (std::size_t i : fold.real_validation)
      val_side.push_back(real[i]);

    const NormStats stats = fit_norm(train_side);
    const Batch tb = make_batch(train_side, stats);
    const Batch vb = make_batch(val_side, stats);
    const FnnModel init =
        initial_model(hp, static_cast<int>(tb.inputs.rows()), static_cast<int>(tb.targets.rows()), cfg.seed);
    const TrainResult fit = train(init, tb, vb, with_hyperparams(cfg, hp));

    CvFold out;
    out.train_r2 = r_squared(fit.model.forward(tb.inputs), tb.targets);
    out.val_r2 = r_squared(fit.model.forward(vb.inputs), vb.targets);
    out.train_size = train_side.size();
    out.val_size = val_side.size();
    report.folds[f] = out;
  });

  for (const auto& f : report.folds) {
    report.mean_train_r2 += f.train_r2;
    report.mean_val_r2 += f.val_r2;
  }
  report.mean_train_r2 /= static_cast<double>(report.folds.size());
  report.mean_val_r2 /= static_cast<double>(report.folds.size());
  return report;
}

IsothermParams predict(const FnnModel& model, const NormStats& stats, const Sample& raw)
{
  if (stats.size() == 0)
    throw ValidationError("normalization statistics are missing");
  if (raw.feature_count() != stats.size())
    throw ValidationError("sample has " + std::to_string(raw.feature_count()) + " features, statistics cover " +
                          std::to_string(stats.size()));
  const std::vector<double> x = normalize(raw.features(), stats);
  const Eigen::VectorXd input = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = model.forward(input);
  std::array<double, IsothermParams::size> v{};
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = y(static_cast<Eigen::Index>(j));
  return IsothermParams(v);
}

} // namespace chromainv
