#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "json.hpp"

namespace scdt::detect {

struct OcsvmParams {
  double nu = 0.025;
  double gamma = 100.0;
  /// Stopping gap, measured on the problem scaled so that sum a = nu n.
  double tolerance = 1e-6;
  double iteration_factor = 1e5;  // cap = factor * n
  /// Re-solve the equality-constrained problem on the free set after SMO.
  bool polish = true;
  std::size_t max_polish = 1500;  // largest free set re-solved densely
  std::size_t cache_bytes = std::size_t{256} << 20;

  void validate() const;
};

/// Solution of the nu-one-class dual over all training points.
struct OcsvmSolution {
  Eigen::VectorXd alpha;
  double rho = 0.0;
  double bound = 0.0;  // upper bound C = 1 / (nu n)
  long iterations = 0;
  double gap = 0.0;  // final maximal violating pair gap, scaled problem
  bool converged = false;
};

/// SMO with second-order working-set selection for
///   min 1/2 a'Ka  s.t.  0 <= a_i <= 1/(nu n),  sum a = 1
/// with K(x, y) = exp(-gamma (x - y)^2) on scalar inputs.
OcsvmSolution ocsvm_solve(std::span<const double> x, const OcsvmParams& params);

inline double rbf(double a, double b, double gamma) {
  const double d = a - b;
  return std::exp(-gamma * d * d);
}

/// Largest violation of the dual optimality conditions, with rho as the offset.
double kkt_violation(std::span<const double> x, const Eigen::VectorXd& alpha, double rho,
                     double gamma, double bound);

struct OcsvmModel {
  double nu = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd support;  // points with alpha > 0
  Eigen::VectorXd alpha;
  double rho = 0.0;
  long iterations = 0;
  double gap = 0.0;
  bool converged = false;

  /// sum_i alpha_i K(s_i, x) - rho
  [[nodiscard]] double decision(double x) const;
  [[nodiscard]] bool is_normal(double x) const { return decision(x) >= 0.0; }
};

/// Throws std::invalid_argument for n < 2 or invalid parameters. A solve
/// that hits the iteration cap is returned with converged = false.
OcsvmModel ocsvm_fit(std::span<const double> x, const OcsvmParams& params);

nlohmann::json to_json(const OcsvmModel& m);
OcsvmModel ocsvm_from_json(const nlohmann::json& j);

/// Reference solver: accelerated projected gradient on the same dual,
/// projecting onto the capped simplex by bisection. Dense kernel; for small n.
Eigen::VectorXd qp_reference(std::span<const double> x, double nu, double gamma,
                             int iterations = 200000);

/// Euclidean projection onto {0 <= a_i <= bound, sum a = total}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double bound, double total = 1.0);

}  // namespace scdt::detect
