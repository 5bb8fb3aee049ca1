#include "scdt/detect/autoencoder.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace scdt::detect {

nn::TrainConfig AutoencoderSpec::train_config(std::uint64_t seed) const {
  nn::TrainConfig c;
  c.learning_rate = learning_rate;
  c.batch_size = batch_size;
  c.epochs = epochs;
  c.loss = nn::Loss::mae;
  c.seed = seed;
  return c;
}

nn::Network build_autoencoder(const AutoencoderSpec& spec, std::uint64_t seed) {
  if (spec.encoder.empty()) throw std::invalid_argument("autoencoder: no encoder layers");
  std::vector<int> widths = spec.encoder;
  for (auto it = spec.encoder.rbegin() + 1; it != spec.encoder.rend(); ++it) widths.push_back(*it);
  nn::Network net;
  Eigen::Index in = spec.inputs;
  for (int w : widths) {
    net.add<nn::Dense>(in, w, nn::Activation::relu);
    in = w;
  }
  net.add<nn::Dense>(in, spec.inputs, nn::Activation::sigmoid);
  net.initialize(seed);
  return net;
}

std::string_view to_string(ErrorMode m) {
  return m == ErrorMode::per_feature ? "per_feature" : "elementwise";
}

ErrorMode parse_error_mode(std::string_view text) {
  if (text == "per_feature") return ErrorMode::per_feature;
  if (text == "elementwise") return ErrorMode::elementwise;
  throw std::invalid_argument("unknown error mode '" + std::string(text) + "'");
}

nn::Matrix reconstruction_error(const nn::Matrix& input, const nn::Matrix& output, Eigen::Index features,
                                ErrorMode mode) {
  if (input.rows() != output.rows() || input.cols() != output.cols())
    throw std::invalid_argument("reconstruction_error: shape mismatch");
  if (features < 1 || input.cols() % features != 0)
    throw std::invalid_argument("reconstruction_error: width is not a multiple of the feature count");
  const nn::Matrix abs = (input - output).cwiseAbs();
  if (mode == ErrorMode::elementwise) return abs;
  const Eigen::Index steps = input.cols() / features;
  nn::Matrix out = nn::Matrix::Zero(input.rows(), features);
  for (Eigen::Index t = 0; t < steps; ++t) out += abs.middleCols(t * features, features);
  return out / static_cast<double>(steps);
}

nn::Matrix reconstruction_errors(nn::Network& autoencoder, const data::WindowSet& set, ErrorMode mode,
                                 std::size_t batch) {
  const Eigen::Index f = set.input_features();
  const Eigen::Index width = mode == ErrorMode::per_feature ? f : f * set.window_size();
  nn::Matrix out(static_cast<Eigen::Index>(set.size()), width);
  std::vector<std::size_t> ids(set.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t start = 0; start < ids.size(); start += batch) {
    const auto n = std::min(batch, ids.size() - start);
    const auto span = std::span<const std::size_t>(ids).subspan(start, n);
    const nn::Matrix x = set.flat_batch(span);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n)) =
        reconstruction_error(x, autoencoder.predict(x), f, mode);
  }
  return out;
}

}  // namespace scdt::detect
