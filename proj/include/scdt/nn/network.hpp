#pragma once

#include <memory>
#include <vector>

#include "scdt/nn/layers.hpp"

namespace scdt::nn {

/// A stack of layers applied in order.
class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    auto& ref = *layer;
    add(std::move(layer));
    return ref;
  }
  void add(std::unique_ptr<Layer> layer);

  /// Draws fresh Glorot-uniform weights for every layer.
  void initialize(std::uint64_t seed);

  Sequence forward(const Sequence& input, Mode mode);
  Sequence backward(const Sequence& grad_output);

  /// Eval-mode forward of a batch; returns the last output step.
  Matrix predict(const Sequence& input);
  Matrix predict(const Matrix& flat_input) { return predict(as_sequence(flat_input)); }

  std::vector<Parameter> parameters();
  void zero_grad();

  /// Layer-indexed parameters, for per-layer regularization.
  std::vector<std::vector<Parameter>> layer_parameters();

  [[nodiscard]] std::size_t size() const { return layers_.size(); }
  [[nodiscard]] Layer& layer(std::size_t i) { return *layers_.at(i); }
  [[nodiscard]] const Layer& layer(std::size_t i) const { return *layers_.at(i); }
  [[nodiscard]] std::size_t parameter_count();

  void seed_dropout(std::uint64_t seed);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  Rng dropout_rng_{substream(0, Stream::dropout)};
};

}  // namespace scdt::nn
