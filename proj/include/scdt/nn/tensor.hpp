#pragma once

#include <Eigen/Core>
#include <vector>

namespace scdt::nn {

/// Rows are samples, columns features.
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Time-major batch: one batch x feature matrix per time step. Non-recurrent
/// data is a sequence of length one.
using Sequence = std::vector<Matrix>;

inline Sequence as_sequence(Matrix m) { return Sequence{std::move(m)}; }

/// Throws std::domain_error if any value is NaN or infinite.
void require_finite(const Sequence& s, const char* where);
void require_finite(const Matrix& m, const char* where);

}  // namespace scdt::nn
