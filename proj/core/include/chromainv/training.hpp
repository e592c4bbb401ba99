#pragma once

#include "chromainv/dataset.hpp"
#include "chromainv/fnn.hpp"
#include "chromainv/normalization.hpp"
#include "chromainv/split.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chromainv {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view s);

struct TrainConfig {
  LossNorm loss_norm = LossNorm::l2;
  double alpha_w = 0.001;
  double alpha_b = 0.001;
  int epochs = 300;
  int batch_size = 32;
  double learning_rate = 0.002;
  std::uint64_t seed = 0;
  /// Epochs without validation improvement before stopping; 0 disables.
  int patience = 40;
  /// Plain constant-step mini-batch descent unless adam is requested.
  Optimizer optimizer = Optimizer::sgd;

  void validate() const;
};

/// One history row. loss is the regularized objective and data_term the
/// error part alone, both over the full training set after the epoch.
struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double data_term = 0.0;
  double train_r2 = 0.0;
  double val_r2 = 0.0;
};

struct TrainResult {
  /// Snapshot with the lowest validation data term (the final model when
  /// no validation data was given).
  FnnModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

/// Normalized inputs and raw targets, one sample per column. Every sample
/// must carry a target.
Batch make_batch(std::span<const Sample> samples, const NormStats& stats);

/// Normalized inputs only, one sample per column.
Eigen::MatrixXd feature_matrix(std::span<const Sample> samples, const NormStats& stats);

/// Mini-batch training. Samples are first put in a content-defined order
/// and then shuffled from `cfg.seed`, so the result does not depend on the
/// order in which samples are supplied. Throws NumericalError naming the
/// epoch when the loss becomes non-finite.
TrainResult train(FnnModel model, const Batch& training, const Batch& validation, const TrainConfig& cfg);

/// Architecture and loss choices explored by grid search.
struct Hyperparams {
  std::vector<int> hidden;
  LossNorm loss_norm = LossNorm::l2;
  Activation activation = Activation::sigmoid;
  double alpha_b = 0.001;
  double alpha_w = 0.001;
};

std::string hidden_to_string(const std::vector<int>& hidden);
std::vector<int> parse_hidden(std::string_view s);

/// Fresh model for `hp` initialized from the "init" stream of `seed`.
FnnModel initial_model(const Hyperparams& hp, int input_size, int output_size, std::uint64_t seed);

/// `base` with the loss settings of `hp`.
TrainConfig with_hyperparams(TrainConfig base, const Hyperparams& hp);

struct GridSpace {
  std::vector<std::vector<int>> hidden;
  std::vector<LossNorm> loss_norms;
  std::vector<Activation> activations;
  std::vector<double> alpha_b;
  std::vector<double> alpha_w;

  /// {(112), (256), (140,112), (140,112,84)} x {L1, L2} x {sigmoid, tanh}
  /// x {0.01, 0.001} x {0.01, 0.001}.
  static GridSpace standard();
  std::size_t size() const;
  /// All combinations in declaration order (hidden outermost, alpha_w innermost).
  std::vector<Hyperparams> combinations() const;
  void validate() const;
};

struct GridRow {
  Hyperparams hp;
  std::size_t order = 0;
  double train_r2 = 0.0;
  double val_r2 = 0.0;
};

struct GridReport {
  /// Every combination, in declaration order.
  std::vector<GridRow> rows;
  /// Best `per_structure` rows of each hidden structure, structures in
  /// declaration order, rows ranked by validation R^2 descending, then
  /// train R^2 descending, then declaration order.
  std::vector<GridRow> top;
};

std::vector<GridRow> rank_top_per_structure(const std::vector<GridRow>& rows, std::size_t per_structure);

GridReport grid_search(const GridSpace& space, const Batch& training, const Batch& validation,
                       const TrainConfig& base, unsigned threads = 1, std::size_t per_structure = 2);

struct CvFold {
  double train_r2 = 0.0;
  double val_r2 = 0.0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
};

struct CvReport {
  std::vector<CvFold> folds;
  double mean_train_r2 = 0.0;
  double mean_val_r2 = 0.0;
};

/// Fold assignment for k-fold cross-validation. Synthetic folds are equal
/// size up to one sample. With real samples, each fold draws two distinct
/// reals for validation and the rest for training, duplicated to the
/// 1:real_ratio portion of their side.
struct CvFoldPlan {
  std::vector<std::size_t> validation;
  std::vector<std::size_t> real_train;
  std::vector<std::size_t> real_validation;
};

std::vector<CvFoldPlan> cv_plan(std::size_t n_synthetic, std::size_t n_real, int k, double real_ratio,
                                std::uint64_t seed);

/// NormStats are refitted on each fold's training side.
CvReport cross_validate(std::span<const Sample> synthetic, std::span<const Sample> real, const Hyperparams& hp,
                        const TrainConfig& cfg, int k = 5, double real_ratio = 10.0, unsigned threads = 1);

/// Normalizes a raw sample with `stats` and returns the model output.
IsothermParams predict(const FnnModel& model, const NormStats& stats, const Sample& raw);

} // namespace chromainv
