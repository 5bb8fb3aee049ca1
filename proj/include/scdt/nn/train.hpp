#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scdt/nn/loss.hpp"
#include "scdt/nn/network.hpp"

namespace scdt::nn {

struct Batch {
  Sequence input;
  Matrix target;  // batch x outputs
};

/// Indexed training examples, materialized a batch at a time.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  [[nodiscard]] virtual std::size_t size() const = 0;
  [[nodiscard]] virtual Batch batch(std::span<const std::size_t> ids) const = 0;
};

/// Examples held in memory as rows of two matrices.
class MatrixSource final : public BatchSource {
 public:
  MatrixSource(Matrix inputs, Matrix targets);
  [[nodiscard]] std::size_t size() const override { return static_cast<std::size_t>(inputs_.rows()); }
  [[nodiscard]] Batch batch(std::span<const std::size_t> ids) const override;

 private:
  Matrix inputs_, targets_;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  int epochs = 10;
  Loss loss = Loss::mae;
  std::vector<double> l1_per_layer;  // factor per layer index; missing entries are 0
  std::uint64_t seed = 0;
  bool shuffle = true;
  double divergence_threshold = 1e6;

  void validate() const;
};

struct LearningCurve {
  std::vector<double> train;
  std::vector<double> validation;  // empty when no validation set was given
};

struct TrainResult {
  LearningCurve curve;
  bool diverged = false;
  std::string message;
};

using EpochCallback = std::function<void(int epoch, double train_loss, double validation_loss)>;

/// Mini-batch Adam training. Keeps the final-epoch weights. The network is
/// expected to be initialized already.
TrainResult train(Network& net, const BatchSource& train_set, const BatchSource* validation_set,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Sample-weighted mean loss over the whole source in eval mode.
double evaluate_loss(Network& net, const BatchSource& source, Loss loss,
                     std::size_t batch_size = 256);

/// Eval-mode predictions stacked in source order.
Matrix predict_all(Network& net, const BatchSource& source, std::size_t batch_size = 256);

/// Sum of the configured L1 penalties over weight parameters.
double l1_total(Network& net, const std::vector<double>& l1_per_layer);

}  // namespace scdt::nn
