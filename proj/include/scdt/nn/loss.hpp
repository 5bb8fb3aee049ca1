#pragma once

#include <string_view>

#include "scdt/nn/layers.hpp"

namespace scdt::nn {

enum class Loss { mae, categorical_cross_entropy };

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view name);

/// Probabilities are floored at this value before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// Mean absolute deviation over every element.
double mae_loss(const Matrix& pred, const Matrix& target);
Matrix mae_gradient(const Matrix& pred, const Matrix& target);

/// Cross-entropy summed over classes, averaged over rows.
double cce_loss(const Matrix& prob, const Matrix& one_hot);
Matrix cce_gradient(const Matrix& prob, const Matrix& one_hot);

double loss_value(Loss loss, const Matrix& pred, const Matrix& target);
Matrix loss_gradient(Loss loss, const Matrix& pred, const Matrix& target);

/// factor * sum |w|.
double l1_penalty(const Matrix& weights, double factor);
/// factor * sign(w), zero at w == 0.
Matrix l1_subgradient(const Matrix& weights, double factor);

}  // namespace scdt::nn
