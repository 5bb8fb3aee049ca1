#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace scdt::detect {

/// Leading principal axis of a sample set.
template <typename Scalar>
struct Pca1 {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector mean;
  Vector axis;  // unit norm, largest-magnitude component positive
  Scalar eigenvalue = 0;
  Scalar explained_ratio = 0;
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> covariance(
    const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const auto mean = samples.colwise().mean();
  const auto centered = (samples.rowwise() - mean).eval();
  return (centered.transpose() * centered) / Scalar(samples.rows() - 1);
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
template <typename Derived>
void orient(Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (std::abs(v(k)) > std::abs(v(best))) best = k;
  if (v(best) < 0) v = -v;
}

/// Rows are samples. Throws std::invalid_argument for fewer than two rows and
/// std::domain_error when the covariance is zero.
template <typename Derived>
Pca1<typename Derived::Scalar> fit_pca1(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (samples.rows() < 2) throw std::invalid_argument("fit_pca1: need at least two samples");
  const Matrix cov = covariance(samples);
  const Scalar total = cov.trace();
  if (!(total > Scalar(0))) throw std::domain_error("fit_pca1: zero covariance");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_pca1: eigensolver failed");
  const Eigen::Index last = cov.rows() - 1;  // eigenvalues ascend
  Pca1<Scalar> model;
  model.mean = samples.colwise().mean().transpose();
  model.axis = eig.eigenvectors().col(last);
  orient(model.axis);
  model.eigenvalue = std::max(eig.eigenvalues()(last), Scalar(0));
  model.explained_ratio = std::min(model.eigenvalue / total, Scalar(1));
  return model;
}

/// Score of one sample (column vector) or of every row of a matrix.
template <typename Scalar, typename Derived>
Scalar project(const Pca1<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return model.axis.dot(x - model.mean);
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> project_rows(const Pca1<Scalar>& model,
                                                      const Eigen::MatrixBase<Derived>& rows) {
  if (rows.cols() != model.mean.size()) throw std::invalid_argument("project_rows: feature mismatch");
  return (rows.rowwise() - model.mean.transpose()) * model.axis;
}

template <typename Scalar>
struct EigenPair {
  Scalar value = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;
  int iterations = 0;
};

/// Dominant eigenpair of a symmetric positive semi-definite matrix.
template <typename Derived>
EigenPair<typename Derived::Scalar> power_iteration(const Eigen::MatrixBase<Derived>& m,
                                                    int max_iterations = 100000,
                                                    typename Derived::Scalar tol = 1e-14) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector v = Vector::Ones(m.rows()) / std::sqrt(Scalar(m.rows()));
  EigenPair<Scalar> out;
  Scalar lambda = 0;
  for (int k = 0; k < max_iterations; ++k) {
    Vector w = m * v;
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) break;
    w /= norm;
    const Scalar next = w.dot(m * w);
    out.iterations = k + 1;
    const bool done = std::abs(next - lambda) <= tol * std::abs(next) && (w - v).norm() < 1e-10;
    v = w;
    lambda = next;
    if (done) break;
  }
  orient(v);
  out.value = lambda;
  out.vector = v;
  return out;
}

}  // namespace scdt::detect
