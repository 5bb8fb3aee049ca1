#pragma once

#include <array>
#include <optional>

#include "scdt/sim/params.hpp"

namespace scdt::sim {

/// Exact output rate of a saturated three-stage line with no intermediate
/// buffers and blocking-after-service. The stationary distribution of the
/// stage-status Markov chain is found with a dense solve; the result is
/// mu3 * P(distributor working). Throws std::invalid_argument unless all
/// rates are positive.
double ctmc_throughput(double mu1, double mu2, double mu3);

struct ZTest {
  double z = 0.0;
  double critical = 0.0;  // two-sided critical value at alpha
  bool reject = false;
};

/// One-sample z test of `mean` against `mu0`. Requires n > 30 and sd > 0.
ZTest z_test(double mean, double sd, long n, double mu0, double alpha);

struct ValidationOptions {
  double alpha = 0.01;
  /// Service rates used inside the simulator, if different from the oracle's
  /// (fault injection).
  std::optional<std::array<double, kNumStages>> simulated_rates;
};

struct ValidationReport {
  double oracle_throughput = 0.0;
  double simulated_mean = 0.0;
  double simulated_sd = 0.0;
  double half_width = 0.0;  // at confidence 1 - alpha
  double alpha = 0.01;
  ZTest test;
  long replications = 0;

  [[nodiscard]] bool ci_contains_oracle() const {
    return oracle_throughput >= simulated_mean - half_width &&
           oracle_throughput <= simulated_mean + half_width;
  }
};

/// Runs the saturated zero-buffer configuration of `params` and compares the
/// daily output of every post-warmup day against ctmc_throughput.
ValidationReport validate_simulator(const SimParams& params, const ValidationOptions& options = {});

}  // namespace scdt::sim
