#include "chromainv/fnn.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chromainv {
namespace {

// Keeps 100*sigmoid(z) strictly inside (0, 100) in double precision.
constexpr double kOutputClamp = 36.0;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a)
{
  if (a == Activation::tanh)
    return z.array().tanh().matrix();
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

// g'(z) expressed through g(z).
Eigen::MatrixXd activation_slope(const Eigen::MatrixXd& g, Activation a)
{
  if (a == Activation::tanh)
    return (1.0 - g.array().square()).matrix();
  return (g.array() * (1.0 - g.array())).matrix();
}

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations; // activations[0] = inputs
  Eigen::MatrixXd output_sigmoid;
  Eigen::MatrixXd output_clamped;           // 1 where the pre-activation was clamped
};

ForwardTrace trace_forward(const FnnModel& model, const Eigen::MatrixXd& inputs)
{
  if (inputs.rows() != model.input_size())
    throw ValidationError("input has " + std::to_string(inputs.rows()) + " features, model expects " +
                          std::to_string(model.input_size()));
  ForwardTrace t;
  t.activations.reserve(model.layer_count());
  t.activations.push_back(inputs);
  const std::size_t last = model.layer_count() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    Eigen::MatrixXd z = model.weight(l) * t.activations.back();
    z.colwise() += model.bias(l);
    t.activations.push_back(activate(z, model.activation()));
  }
  Eigen::MatrixXd z = model.weight(last) * t.activations.back();
  z.colwise() += model.bias(last);
  t.output_clamped = z.unaryExpr([](double v) { return std::abs(v) > kOutputClamp ? 1.0 : 0.0; });
  t.output_sigmoid = z.unaryExpr([](double v) { return sigmoid(std::clamp(v, -kOutputClamp, kOutputClamp)); });
  return t;
}

void check_batch(const FnnModel& model, const Batch& batch)
{
  if (batch.size() == 0)
    throw ValidationError("batch is empty");
  if (batch.targets.cols() != batch.inputs.cols() || batch.targets.rows() != model.output_size())
    throw ValidationError("batch targets do not match the model output size");
}

} // namespace

std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "sigmoid"; }
std::string to_string(LossNorm n) { return n == LossNorm::l1 ? "L1" : "L2"; }

Activation parse_activation(std::string_view s)
{
  if (s == "sigmoid")
    return Activation::sigmoid;
  if (s == "tanh")
    return Activation::tanh;
  throw ValidationError("unknown activation '" + std::string(s) + "' (sigmoid, tanh)");
}

LossNorm parse_loss_norm(std::string_view s)
{
  if (s == "L1" || s == "l1" || s == "MAE" || s == "mae")
    return LossNorm::l1;
  if (s == "L2" || s == "l2" || s == "MSE" || s == "mse")
    return LossNorm::l2;
  throw ValidationError("unknown loss norm '" + std::string(s) + "' (L1, L2)");
}

FnnModel::FnnModel(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation)
{
  check_sizes();
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l], sizes_[l - 1]));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[l]));
  }
}

FnnModel FnnModel::initialized(std::vector<int> layer_sizes, Activation activation, Rng& rng)
{
  FnnModel m(std::move(layer_sizes), activation);
  for (auto& w : m.weights_) {
    const double r = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-r, r);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        w(i, j) = dist(rng);
  }
  return m;
}

void FnnModel::check_sizes() const
{
  if (sizes_.size() < 2)
    throw ValidationError("a network needs at least an input and an output layer");
  for (int s : sizes_)
    if (s <= 0)
      throw ValidationError("layer sizes must be positive");
}

Eigen::MatrixXd FnnModel::forward(const Eigen::MatrixXd& inputs) const
{
  return output_scale * trace_forward(*this, inputs).output_sigmoid;
}

Eigen::VectorXd FnnModel::forward(const Eigen::VectorXd& input) const
{
  const Eigen::MatrixXd out = forward(Eigen::MatrixXd(input));
  return out.col(0);
}

std::size_t FnnModel::weight_count() const
{
  std::size_t n = 0;
  for (const auto& w : weights_)
    n += static_cast<std::size_t>(w.size());
  return n;
}

std::size_t FnnModel::bias_count() const
{
  std::size_t n = 0;
  for (const auto& b : biases_)
    n += static_cast<std::size_t>(b.size());
  return n;
}

Eigen::VectorXd FnnModel::parameters() const
{
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.segment(k, weights_[l].size()) = Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
    k += weights_[l].size();
    flat.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return flat;
}

void FnnModel::set_parameters(const Eigen::VectorXd& flat)
{
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    throw ValidationError("parameter vector has the wrong length");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) = flat.segment(k, weights_[l].size());
    k += weights_[l].size();
    biases_[l] = flat.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

bool operator==(const FnnModel& a, const FnnModel& b)
{
  if (a.sizes_ != b.sizes_ || a.activation_ != b.activation_)
    return false;
  for (std::size_t l = 0; l < a.weights_.size(); ++l)
    if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l])
      return false;
  return true;
}

LossTerms loss(const FnnModel& model, const Batch& batch, LossNorm norm, double alpha_w, double alpha_b)
{
  check_batch(model, batch);
  const Eigen::MatrixXd diff = model.forward(batch.inputs) - batch.targets;
  const double entries = static_cast<double>(diff.size());
  LossTerms t;
  if (norm == LossNorm::l2) {
    t.data = diff.squaredNorm() / entries;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      t.weight_penalty += model.weight(l).squaredNorm();
      t.bias_penalty += model.bias(l).squaredNorm();
    }
  } else {
    t.data = diff.cwiseAbs().sum() / entries;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      t.weight_penalty += model.weight(l).cwiseAbs().sum();
      t.bias_penalty += model.bias(l).cwiseAbs().sum();
    }
  }
  t.total = t.data + alpha_w * t.weight_penalty + alpha_b * t.bias_penalty;
  return t;
}

Gradient gradients(const FnnModel& model, const Batch& batch, LossNorm norm, double alpha_w, double alpha_b)
{
  check_batch(model, batch);
  const ForwardTrace t = trace_forward(model, batch.inputs);
  const Eigen::MatrixXd prediction = FnnModel::output_scale * t.output_sigmoid;
  const Eigen::MatrixXd diff = prediction - batch.targets;
  const double entries = static_cast<double>(diff.size());

  Gradient g;
  const std::size_t layers = model.layer_count();
  g.weights.resize(layers);
  g.biases.resize(layers);

  // dL/dyhat
  Eigen::MatrixXd delta = norm == LossNorm::l2 ? Eigen::MatrixXd((2.0 / entries) * diff)
                                               : Eigen::MatrixXd(diff.unaryExpr(&sign_or_zero) / entries);
  // through 100*sigmoid(z), zero slope where z was clamped
  delta.array() *= FnnModel::output_scale * t.output_sigmoid.array() * (1.0 - t.output_sigmoid.array()) *
                   (1.0 - t.output_clamped.array());

  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta * t.activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = model.weight(l).transpose() * delta;
      delta = back.cwiseProduct(activation_slope(t.activations[l], model.activation()));
    }
  }

  g.loss.data = norm == LossNorm::l2 ? diff.squaredNorm() / entries : diff.cwiseAbs().sum() / entries;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = model.weight(l);
    const auto& b = model.bias(l);
    if (norm == LossNorm::l2) {
      g.weights[l] += (2.0 * alpha_w) * w;
      g.biases[l] += (2.0 * alpha_b) * b;
      g.loss.weight_penalty += w.squaredNorm();
      g.loss.bias_penalty += b.squaredNorm();
    } else {
      g.weights[l] += alpha_w * w.unaryExpr(&sign_or_zero);
      g.biases[l] += alpha_b * b.unaryExpr(&sign_or_zero);
      g.loss.weight_penalty += w.cwiseAbs().sum();
      g.loss.bias_penalty += b.cwiseAbs().sum();
    }
  }
  g.loss.total = g.loss.data + alpha_w * g.loss.weight_penalty + alpha_b * g.loss.bias_penalty;
  return g;
}

Eigen::VectorXd Gradient::flatten() const
{
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += weights[l].size() + biases[l].size();
  Eigen::VectorXd flat(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.segment(k, weights[l].size()) = Eigen::Map<const Eigen::VectorXd>(weights[l].data(), weights[l].size());
    k += weights[l].size();
    flat.segment(k, biases[l].size()) = biases[l];
    k += biases[l].size();
  }
  return flat;
}

namespace {

void check_r2_inputs(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets)
{
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
    throw ValidationError("predictions and targets differ in shape");
  if (targets.cols() < 2)
    throw ValidationError("R^2 needs at least two samples");
}

} // namespace

double r_squared(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets)
{
  check_r2_inputs(predictions, targets);
  const Eigen::VectorXd mean = targets.rowwise().mean();
  const double ss_res = (predictions - targets).squaredNorm();
  const double ss_tot = (targets.colwise() - mean).squaredNorm();
  if (!(ss_tot > 0.0))
    throw ValidationError("R^2 undefined: all targets are identical");
  return 1.0 - ss_res / ss_tot;
}

Eigen::VectorXd r_squared_per_output(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets)
{
  check_r2_inputs(predictions, targets);
  Eigen::VectorXd r2(targets.rows());
  for (Eigen::Index j = 0; j < targets.rows(); ++j) {
    const double variance = (targets.row(j).array() - targets.row(j).mean()).square().sum();
    r2(j) = variance > 0.0 ? r_squared(predictions.row(j), targets.row(j)) : std::numeric_limits<double>::quiet_NaN();
  }
  return r2;
}

} // namespace chromainv
