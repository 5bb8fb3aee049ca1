#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

namespace scdt::data {

/// Per-feature minimum and maximum of a training set.
template <typename Scalar>
struct MinMaxStats {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector min;
  Vector max;

  [[nodiscard]] Eigen::Index features() const { return min.size(); }
  /// Columns whose training range collapsed to a single value.
  [[nodiscard]] std::vector<Eigen::Index> constant_features() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < min.size(); ++j)
      if (!(max(j) > min(j))) out.push_back(j);
    return out;
  }
};

using NormalizationStats = MinMaxStats<double>;

/// Fits column-wise min/max over the rows of `samples`.
template <typename Derived>
MinMaxStats<typename Derived::Scalar> fit_minmax(const Eigen::MatrixBase<Derived>& samples) {
  if (samples.rows() < 1) throw std::invalid_argument("fit_minmax: no samples");
  MinMaxStats<typename Derived::Scalar> stats;
  stats.min = samples.colwise().minCoeff().transpose();
  stats.max = samples.colwise().maxCoeff().transpose();
  return stats;
}

/// (x - min) / (max - min), clamped to [0, 1]. Constant features map to 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> apply_minmax(
    const MinMaxStats<typename Derived::Scalar>& stats, const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.cols() != stats.features())
    throw std::invalid_argument("apply_minmax: feature count mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(samples.rows(),
                                                                              samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Scalar range = stats.max(j) - stats.min(j);
    if (!(range > Scalar(0))) {
      out.col(j).setZero();
      continue;
    }
    out.col(j) = ((samples.col(j).array() - stats.min(j)) / range)
                     .cwiseMax(Scalar(0))
                     .cwiseMin(Scalar(1))
                     .matrix();
  }
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> invert_minmax(
    const MinMaxStats<typename Derived::Scalar>& stats, const Eigen::MatrixBase<Derived>& normalized) {
  if (normalized.cols() != stats.features())
    throw std::invalid_argument("invert_minmax: feature count mismatch");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      normalized;
  for (Eigen::Index j = 0; j < normalized.cols(); ++j)
    out.col(j) = (normalized.col(j).array() * (stats.max(j) - stats.min(j)) + stats.min(j)).matrix();
  return out;
}

}  // namespace scdt::data
