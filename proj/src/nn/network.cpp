#include "scdt/nn/network.hpp"

#include <stdexcept>

namespace scdt::nn {

Network::Network(const Network& other) : dropout_rng_(other.dropout_rng_) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this == &other) return *this;
  layers_.clear();
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
  dropout_rng_ = other.dropout_rng_;
  return *this;
}

void Network::add(std::unique_ptr<Layer> layer) {
  if (!layers_.empty() && layers_.back()->output_size() != layer->input_size())
    throw std::invalid_argument("Network: layer input size does not match previous output");
  layers_.push_back(std::move(layer));
}

void Network::initialize(std::uint64_t seed) {
  auto rng = substream(seed, Stream::init);
  for (auto& l : layers_) {
    if (auto* d = dynamic_cast<Dense*>(l.get()))
      d->initialize(rng);
    else if (auto* r = dynamic_cast<Lstm*>(l.get()))
      r->initialize(rng);
  }
  seed_dropout(seed);
}

void Network::seed_dropout(std::uint64_t seed) { dropout_rng_ = substream(seed, Stream::dropout); }

Sequence Network::forward(const Sequence& input, Mode mode) {
  if (layers_.empty()) throw std::logic_error("Network: no layers");
  require_finite(input, "network input");
  Sequence x = input;
  for (auto& l : layers_) x = l->forward(x, mode, dropout_rng_);
  require_finite(x, "network output");
  return x;
}

Sequence Network::backward(const Sequence& grad_output) {
  Sequence g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

Matrix Network::predict(const Sequence& input) { return forward(input, Mode::eval).back(); }

std::vector<Parameter> Network::parameters() {
  std::vector<Parameter> out;
  for (auto& l : layers_)
    for (auto& p : l->parameters()) out.push_back(p);
  return out;
}

std::vector<std::vector<Parameter>> Network::layer_parameters() {
  std::vector<std::vector<Parameter>> out;
  for (auto& l : layers_) out.push_back(l->parameters());
  return out;
}

void Network::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (auto& p : parameters()) n += static_cast<std::size_t>(p.value->size());
  return n;
}

}  // namespace scdt::nn
