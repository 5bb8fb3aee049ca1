#include "scdt/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "scdt/nn/optimizer.hpp"

namespace scdt::nn {

MatrixSource::MatrixSource(Matrix inputs, Matrix targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (inputs_.rows() != targets_.rows())
    throw std::invalid_argument("MatrixSource: row counts differ");
}

Batch MatrixSource::batch(std::span<const std::size_t> ids) const {
  Batch b;
  Matrix x(static_cast<Eigen::Index>(ids.size()), inputs_.cols());
  b.target.resize(x.rows(), targets_.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(ids[r]);
    x.row(static_cast<Eigen::Index>(r)) = inputs_.row(i);
    b.target.row(static_cast<Eigen::Index>(r)) = targets_.row(i);
  }
  b.input = as_sequence(std::move(x));
  return b;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  for (double f : l1_per_layer)
    if (f < 0.0) throw std::invalid_argument("TrainConfig: negative l1 factor");
}

double l1_total(Network& net, const std::vector<double>& l1_per_layer) {
  double total = 0.0;
  auto layers = net.layer_parameters();
  for (std::size_t l = 0; l < layers.size() && l < l1_per_layer.size(); ++l)
    for (auto& p : layers[l])
      if (p.regularized) total += l1_penalty(*p.value, l1_per_layer[l]);
  return total;
}

namespace {

void add_l1_gradients(Network& net, const std::vector<double>& l1_per_layer) {
  auto layers = net.layer_parameters();
  for (std::size_t l = 0; l < layers.size() && l < l1_per_layer.size(); ++l) {
    if (l1_per_layer[l] == 0.0) continue;
    for (auto& p : layers[l])
      if (p.regularized) *p.grad += l1_subgradient(*p.value, l1_per_layer[l]);
  }
}

// The loss gradient only reaches the last output step.
Sequence output_gradient(const Sequence& out, Matrix grad) {
  Sequence g(out.size());
  for (std::size_t t = 0; t + 1 < out.size(); ++t) g[t] = Matrix::Zero(out[t].rows(), out[t].cols());
  g.back() = std::move(grad);
  return g;
}

}  // namespace

double evaluate_loss(Network& net, const BatchSource& source, Loss loss, std::size_t batch_size) {
  if (source.size() == 0) throw std::invalid_argument("evaluate_loss: empty source");
  std::vector<std::size_t> ids(source.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  double sum = 0.0;
  for (std::size_t start = 0; start < ids.size(); start += batch_size) {
    const auto n = std::min(batch_size, ids.size() - start);
    const auto b = source.batch(std::span(ids).subspan(start, n));
    sum += loss_value(loss, net.predict(b.input), b.target) * static_cast<double>(n);
  }
  return sum / static_cast<double>(ids.size());
}

Matrix predict_all(Network& net, const BatchSource& source, std::size_t batch_size) {
  std::vector<std::size_t> ids(source.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  Matrix out;
  for (std::size_t start = 0; start < ids.size(); start += batch_size) {
    const auto n = std::min(batch_size, ids.size() - start);
    const auto b = source.batch(std::span(ids).subspan(start, n));
    const Matrix p = net.predict(b.input);
    if (out.size() == 0) out.resize(static_cast<Eigen::Index>(ids.size()), p.cols());
    out.middleRows(static_cast<Eigen::Index>(start), p.rows()) = p;
  }
  return out;
}

TrainResult train(Network& net, const BatchSource& train_set, const BatchSource* validation_set,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  if (validation_set != nullptr && validation_set->size() == 0)
    throw std::invalid_argument("train: empty validation set");

  TrainResult result;
  Adam adam(net.parameters());
  auto shuffle_rng = substream(config.seed, Stream::shuffle);
  net.seed_dropout(config.seed);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto n = std::min(config.batch_size, order.size() - start);
      const auto b = train_set.batch(std::span(order).subspan(start, n));
      net.zero_grad();
      const Sequence out = net.forward(b.input, Mode::train);
      const double batch_loss = loss_value(config.loss, out.back(), b.target);
      if (!std::isfinite(batch_loss) || batch_loss > config.divergence_threshold) {
        std::ostringstream msg;
        msg << "diverged at epoch " << epoch << ", batch starting " << start << ": loss "
            << batch_loss;
        result.diverged = true;
        result.message = msg.str();
        return result;
      }
      sum += batch_loss * static_cast<double>(n);
      net.backward(output_gradient(out, loss_gradient(config.loss, out.back(), b.target)));
      add_l1_gradients(net, config.l1_per_layer);
      try {
        adam.step(config.learning_rate);
      } catch (const std::domain_error& e) {
        std::ostringstream msg;
        msg << "aborted at epoch " << epoch << ", batch starting " << start << ": " << e.what();
        result.diverged = true;
        result.message = msg.str();
        return result;
      }
    }
    const double train_loss =
        sum / static_cast<double>(order.size()) + l1_total(net, config.l1_per_layer);
    result.curve.train.push_back(train_loss);
    double val_loss = std::nan("");
    if (validation_set != nullptr) {
      val_loss = evaluate_loss(net, *validation_set, config.loss);
      result.curve.validation.push_back(val_loss);
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss);
  }
  return result;
}

}  // namespace scdt::nn
