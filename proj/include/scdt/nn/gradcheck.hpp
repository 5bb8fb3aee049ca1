#pragma once

#include "scdt/nn/network.hpp"

namespace scdt::nn {

struct GradientCheck {
  double max_relative_error = 0.0;  // worst parameter tensor, input gradient included
  std::size_t checked = 0;          // scalar entries perturbed
};

/// Compares backprop against central differences for the smooth objective
/// sum_t <R_t, output_t> plus the given per-layer L1 penalties. R is drawn
/// from `seed`. Error per tensor is |g - n| / max(|g| + |n|, 1e-12) in the
/// Euclidean norm. Runs in eval mode, so dropout is off.
GradientCheck check_gradients(Network& net, const Sequence& input, std::uint64_t seed,
                              const std::vector<double>& l1_per_layer = {}, double step = 1e-5);

}  // namespace scdt::nn
