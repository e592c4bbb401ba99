#pragma once

#include "chromainv/random.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace chromainv {

/// Hidden-layer activations. ReLU is deliberately not offered: units that
/// stop firing never recover under gradient training.
enum class Activation { sigmoid, tanh };

enum class LossNorm { l1, l2 };

std::string to_string(Activation a);
std::string to_string(LossNorm n);
Activation parse_activation(std::string_view s);
LossNorm parse_loss_norm(std::string_view s);

/// Fully connected feed-forward network. Hidden layers apply the chosen
/// activation; the output layer applies a sigmoid scaled by output_scale,
/// so every output lies strictly inside (0, output_scale).
///
/// Layer l (1-based) maps size[l-1] inputs to size[l] outputs with a
/// weight matrix of shape size[l] x size[l-1] and a bias of length size[l].
class FnnModel {
public:
  static constexpr double output_scale = 100.0;

  FnnModel() = default;
  /// Zero weights and biases.
  FnnModel(std::vector<int> layer_sizes, Activation activation);
  /// Weights ~ U(-r, r) with r = sqrt(6 / (fan_in + fan_out)); biases 0.
  static FnnModel initialized(std::vector<int> layer_sizes, Activation activation, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  std::size_t layer_count() const { return weights_.size(); }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_[layer]; }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_[layer]; }
  Eigen::MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }

  /// Inputs are one sample per column; returns outputs one per column.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  std::size_t weight_count() const;
  std::size_t bias_count() const;
  std::size_t parameter_count() const { return weight_count() + bias_count(); }

  /// All parameters flattened: per layer, weights column-major then biases.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  friend bool operator==(const FnnModel& a, const FnnModel& b);

private:
  void check_sizes() const;

  std::vector<int> sizes_;
  Activation activation_ = Activation::sigmoid;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

/// Supervised batch: one sample per column.
struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;

  Eigen::Index size() const { return inputs.cols(); }
};

struct LossTerms {
  double data = 0.0;
  double weight_penalty = 0.0;
  double bias_penalty = 0.0;
  double total = 0.0;
};

/// Regularized loss
///
///   L = mean_{k,i} |yhat_ki - y_ki|^p + alpha_w sum |w|^p + alpha_b sum |b|^p
///
/// with p = 1 or 2; the data term averages over every output entry of the
/// batch and the penalties sum over every weight and bias.
/// weight_penalty and bias_penalty are reported unscaled by alpha.
LossTerms loss(const FnnModel& model, const Batch& batch, LossNorm norm, double alpha_w, double alpha_b);

/// Gradient of `loss` in the layout of FnnModel::parameters(). The L1
/// subgradient at 0 is taken as 0.
struct Gradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  LossTerms loss;

  Eigen::VectorXd flatten() const;
};

Gradient gradients(const FnnModel& model, const Batch& batch, LossNorm norm, double alpha_w, double alpha_b);

/// 1 - sum_k |yhat_k - y_k|^2 / sum_k |ybar - y_k|^2 over columns. Throws
/// ValidationError for fewer than two samples or zero target variance.
double r_squared(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

/// r_squared of each output row separately; NaN for a row whose targets
/// are all identical.
Eigen::VectorXd r_squared_per_output(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

} // namespace chromainv
