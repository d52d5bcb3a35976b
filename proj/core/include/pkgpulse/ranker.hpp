#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pkgpulse {

enum class ModelKind { Linear, Mlp };

/// theta(x) = sigmoid(W.x + b)
struct LinearRanker {
  std::vector<double> weights;
  double bias = 0.0;
};

/// theta(x) = W2 . tanh(W1 x + b1) + b2, trained with the margin-scaled
/// sigmoid pair cost whose scale a = softplus(alpha) and margin
/// b = softplus(beta) stay positive for any real alpha, beta.
struct MlpRanker {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
};

double sigmoid(double z) noexcept;
double softplus(double z) noexcept;

/// Throws DimensionMismatch.
double lr_score(const LinearRanker& params, std::span<const double> x);
/// max(0, theta(x_neg) - theta(x_pos) + 1) on post-sigmoid scores.
double lr_pair_loss(const LinearRanker& params, std::span<const double> pos, std::span<const double> neg);
/// Loss value; `grad` receives dLoss/dparams with the shape of `params`.
double lr_pair_loss_grad(const LinearRanker& params, std::span<const double> pos, std::span<const double> neg,
                         LinearRanker& grad);

double mlp_score(const MlpRanker& params, std::span<const double> x);
/// sigmoid(a * (theta(x_neg) - theta(x_pos) - b)) without the penalty.
double mlp_pair_cost(const MlpRanker& params, std::span<const double> pos, std::span<const double> neg);
/// Cost plus l2 * (sum of squares of every learnable parameter, alpha and beta included).
double mlp_pair_loss(const MlpRanker& params, std::span<const double> pos, std::span<const double> neg, double l2);
double mlp_pair_loss_grad(const MlpRanker& params, std::span<const double> pos, std::span<const double> neg,
                          double l2, MlpRanker& grad);

/// Flat parameter views (MLP order: w1, b1, w2, b2, alpha, beta).
std::vector<double> flatten(const LinearRanker& p);
std::vector<double> flatten(const MlpRanker& p);
void assign_flat(std::span<const double> flat, LinearRanker& p);
void assign_flat(std::span<const double> flat, MlpRanker& p);

/// Per-feature min-max scaling fitted on training rows. Constant features
/// map to 0.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  bool fitted() const noexcept { return !lo.empty(); }
  void fit(std::span<const std::vector<double>> rows);
  std::vector<double> transform(std::span<const double> x) const;
};

/// A trained ranker with its input scaling.
struct Ranker {
  ModelKind kind = ModelKind::Linear;
  LinearRanker linear;
  MlpRanker mlp;
  MinMaxScaler scaler;

  std::size_t input_size() const noexcept { return kind == ModelKind::Linear ? linear.weights.size() : mlp.inputs; }
  /// Scales `x` (when a scaler is fitted) and scores it.
  double score(std::span<const double> x) const;
};

/// One recommendation query: feature vectors of positive and negative
/// developers of a (package, horizon).
struct PairInstance {
  std::vector<std::vector<double>> positives;
  std::vector<std::vector<double>> negatives;
};

/// Pair: one SGD step per (d+, d-) pair. Instance: one step per instance on
/// the mean gradient of its pairs.
enum class BatchUnit { Pair, Instance };

struct SgdOptions {
  int epochs = 10;
  double learning_rate = 0.005;
  std::uint64_t seed = 0;
  std::size_t hidden = 16;
  double l2 = 1e-4;
  double alpha0 = 1.0;
  double beta0 = 0.0;
  double init_scale = 0.05;
  BatchUnit batch = BatchUnit::Pair;
};

struct SgdResult {
  Ranker model;
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;  // mean pair loss over all pairs after each epoch
};

/// Throws UntrainedModelError on an empty instance list and
/// std::invalid_argument when an instance lacks positives or negatives.
SgdResult sgd_fit(ModelKind kind, std::span<const PairInstance> instances, const SgdOptions& options = {});

/// Mean pair loss of `model` (unscaled inputs) over every pair.
double mean_pair_loss(const Ranker& model, std::span<const PairInstance> instances, double l2);

std::string to_json(const Ranker& model, const SgdOptions& options);
Ranker ranker_from_json(std::string_view text);

}  // namespace pkgpulse
