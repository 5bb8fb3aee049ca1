#pragma once

#include <vector>

#include "scdt/nn/layers.hpp"

namespace scdt::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates for one parameter tensor.
struct AdamState {
  Matrix m;
  Matrix v;
  long step = 0;
};

/// One bias-corrected Adam update of `value` in place.
void adam_step(AdamState& state, Matrix& value, const Matrix& grad, double lr,
               const AdamConfig& config = {});

/// Adam over a fixed list of parameters.
class Adam {
 public:
  explicit Adam(std::vector<Parameter> params, AdamConfig config = {});

  /// Throws std::domain_error on a non-finite gradient, leaving values untouched.
  void step(double lr);
  [[nodiscard]] long steps() const { return steps_; }

 private:
  std::vector<Parameter> params_;
  std::vector<AdamState> states_;
  AdamConfig config_;
  long steps_ = 0;
};

}  // namespace scdt::nn
