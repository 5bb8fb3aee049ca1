#include "scdt/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scdt::nn {

void adam_step(AdamState& state, Matrix& value, const Matrix& grad, double lr,
               const AdamConfig& config) {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  if (state.m.size() == 0) {
    state.m = Matrix::Zero(value.rows(), value.cols());
    state.v = Matrix::Zero(value.rows(), value.cols());
  }
  ++state.step;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v = config.beta2 * state.v + (1.0 - config.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  value.array() -= lr * (state.m.array() / c1) /
                   ((state.v.array() / c2).sqrt() + config.epsilon);
}

Adam::Adam(std::vector<Parameter> params, AdamConfig config)
    : params_(std::move(params)), states_(params_.size()), config_(config) {}

void Adam::step(double lr) {
  for (std::size_t k = 0; k < params_.size(); ++k)
    if (!params_[k].grad->allFinite())
      throw std::domain_error("Adam: non-finite gradient in parameter " + std::to_string(k));
  for (std::size_t k = 0; k < params_.size(); ++k)
    adam_step(states_[k], *params_[k].value, *params_[k].grad, lr, config_);
  ++steps_;
}

}  // namespace scdt::nn
