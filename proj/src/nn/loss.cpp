#include "scdt/nn/loss.hpp"

#include <stdexcept>
#include <string>

namespace scdt::nn {

std::string_view to_string(Loss loss) {
  return loss == Loss::mae ? "mae" : "categorical_cross_entropy";
}

Loss parse_loss(std::string_view name) {
  if (name == "mae") return Loss::mae;
  if (name == "categorical_cross_entropy" || name == "cce") return Loss::categorical_cross_entropy;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  if (a.size() == 0) throw std::invalid_argument(std::string(what) + ": empty input");
}
}  // namespace

double mae_loss(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mae_loss");
  return (pred - target).cwiseAbs().mean();
}

Matrix mae_gradient(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "mae_gradient");
  const double scale = 1.0 / static_cast<double>(pred.size());
  return (pred - target).unaryExpr([scale](double d) {
    return d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
  });
}

double cce_loss(const Matrix& prob, const Matrix& one_hot) {
  require_same_shape(prob, one_hot, "cce_loss");
  const Matrix logp = prob.cwiseMax(kProbabilityFloor).array().log().matrix();
  return -(one_hot.array() * logp.array()).sum() / static_cast<double>(prob.rows());
}

Matrix cce_gradient(const Matrix& prob, const Matrix& one_hot) {
  require_same_shape(prob, one_hot, "cce_gradient");
  const double scale = -1.0 / static_cast<double>(prob.rows());
  return (scale * one_hot.array() / prob.cwiseMax(kProbabilityFloor).array()).matrix();
}

double loss_value(Loss loss, const Matrix& pred, const Matrix& target) {
  return loss == Loss::mae ? mae_loss(pred, target) : cce_loss(pred, target);
}

Matrix loss_gradient(Loss loss, const Matrix& pred, const Matrix& target) {
  return loss == Loss::mae ? mae_gradient(pred, target) : cce_gradient(pred, target);
}

double l1_penalty(const Matrix& weights, double factor) {
  if (factor < 0.0) throw std::invalid_argument("l1_penalty: negative factor");
  return factor == 0.0 ? 0.0 : factor * weights.cwiseAbs().sum();
}

Matrix l1_subgradient(const Matrix& weights, double factor) {
  return weights.unaryExpr([factor](double w) {
    return w > 0.0 ? factor : (w < 0.0 ? -factor : 0.0);
  });
}

}  // namespace scdt::nn
