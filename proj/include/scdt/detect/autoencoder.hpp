#pragma once

#include <vector>

#include "scdt/data/windows.hpp"
#include "scdt/nn/network.hpp"
#include "scdt/nn/train.hpp"

namespace scdt::detect {

struct AutoencoderSpec {
  int inputs = data::kFlatWindow;
  std::vector<int> encoder{256, 128, 64, 32};  // decoder mirrors it
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  int epochs = 1000;

  [[nodiscard]] nn::TrainConfig train_config(std::uint64_t seed) const;
};

/// Dense autoencoder: relu hidden layers, sigmoid output.
nn::Network build_autoencoder(const AutoencoderSpec& spec, std::uint64_t seed);

enum class ErrorMode {
  per_feature,  // mean absolute error of each feature over the window's steps
  elementwise,  // absolute error of every flattened entry
};

std::string_view to_string(ErrorMode m);
ErrorMode parse_error_mode(std::string_view text);

/// Rows of `input` and `output` are flattened windows (row-major by step).
nn::Matrix reconstruction_error(const nn::Matrix& input, const nn::Matrix& output, Eigen::Index features,
                                ErrorMode mode = ErrorMode::per_feature);

/// Error vectors of every window in the set, in set order.
nn::Matrix reconstruction_errors(nn::Network& autoencoder, const data::WindowSet& set,
                                 ErrorMode mode = ErrorMode::per_feature, std::size_t batch = 512);

}  // namespace scdt::detect
