#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scdt/nn/tensor.hpp"
#include "scdt/random.hpp"

namespace scdt::nn {

enum class Activation { linear, relu, sigmoid, tanh, softmax };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Applies an activation row-wise (softmax normalizes each row).
Matrix activate(Activation a, const Matrix& z);
/// Gradient with respect to pre-activations, given the activated output and
/// the gradient with respect to it.
Matrix activation_backward(Activation a, const Matrix& activated, const Matrix& grad);

enum class Mode { train, eval };

/// A trainable tensor and its gradient accumulator.
struct Parameter {
  Matrix* value;
  Matrix* grad;
  bool regularized;  // subject to L1: input kernels only, not recurrent weights or biases
};

class Layer {
 public:
  virtual ~Layer() = default;

  /// Caches whatever backward needs from the most recent call.
  virtual Sequence forward(const Sequence& input, Mode mode, Rng& rng) = 0;
  /// Accumulates parameter gradients and returns the gradient w.r.t. the input.
  virtual Sequence backward(const Sequence& grad_output) = 0;

  virtual std::vector<Parameter> parameters() = 0;
  [[nodiscard]] virtual std::unique_ptr<Layer> clone() const = 0;
  [[nodiscard]] virtual std::string_view kind() const = 0;
  [[nodiscard]] virtual Eigen::Index input_size() const = 0;
  [[nodiscard]] virtual Eigen::Index output_size() const = 0;

  void zero_grad();
};

/// Fully connected layer applied independently to each time step.
class Dense final : public Layer {
 public:
  Dense(Eigen::Index inputs, Eigen::Index units, Activation activation);

  Sequence forward(const Sequence& input, Mode mode, Rng& rng) override;
  Sequence backward(const Sequence& grad_output) override;
  std::vector<Parameter> parameters() override;
  [[nodiscard]] std::unique_ptr<Layer> clone() const override;
  [[nodiscard]] std::string_view kind() const override { return "dense"; }
  [[nodiscard]] Eigen::Index input_size() const override { return weight.rows(); }
  [[nodiscard]] Eigen::Index output_size() const override { return weight.cols(); }

  /// Glorot-uniform weights, zero bias.
  void initialize(Rng& rng);

  Matrix weight;  // inputs x units
  Matrix bias;    // 1 x units
  Activation activation;

 private:
  Matrix weight_grad_, bias_grad_;
  Sequence inputs_, outputs_;
};

/// Long short-term memory layer. Gate blocks are laid out input, forget,
/// cell, output along the columns of each weight matrix.
class Lstm final : public Layer {
 public:
  Lstm(Eigen::Index inputs, Eigen::Index units, bool return_sequences, double dropout = 0.0);

  Sequence forward(const Sequence& input, Mode mode, Rng& rng) override;
  Sequence backward(const Sequence& grad_output) override;
  std::vector<Parameter> parameters() override;
  [[nodiscard]] std::unique_ptr<Layer> clone() const override;
  [[nodiscard]] std::string_view kind() const override { return "lstm"; }
  [[nodiscard]] Eigen::Index input_size() const override { return input_weight.rows(); }
  [[nodiscard]] Eigen::Index output_size() const override { return units(); }
  [[nodiscard]] Eigen::Index units() const { return recurrent_weight.rows(); }

  /// Glorot-uniform kernels, zero bias except a forget-gate bias of one.
  void initialize(Rng& rng);

  Matrix input_weight;      // inputs x 4u
  Matrix recurrent_weight;  // u x 4u
  Matrix bias;              // 1 x 4u
  bool return_sequences;
  double dropout;  // applied to the layer's outputs in training mode

 private:
  struct Step {
    Matrix x, h_prev, c_prev, i, f, g, o, c, tanh_c, mask;
  };
  Matrix input_grad_, recurrent_grad_, bias_grad_;
  std::vector<Step> steps_;
};

}  // namespace scdt::nn
