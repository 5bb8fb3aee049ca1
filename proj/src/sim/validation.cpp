#include "scdt/sim/validation.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scdt/sim/simulator.hpp"

namespace scdt::sim {

namespace {

enum class Status { working, blocked, starved };

struct LineState {
  Status s1, s2, s3;
  bool operator==(const LineState&) const = default;
};

// Stage 1 is never starved and stage 3 is never blocked. A stage can only be
// blocked while the next one holds a unit.
std::vector<LineState> feasible_states() {
  std::vector<LineState> out;
  for (auto s1 : {Status::working, Status::blocked})
    for (auto s2 : {Status::working, Status::blocked, Status::starved})
      for (auto s3 : {Status::working, Status::starved}) {
        if (s1 == Status::blocked && s2 == Status::starved) continue;
        if (s2 == Status::blocked && s3 != Status::working) continue;
        out.push_back({s1, s2, s3});
      }
  return out;
}

}  // namespace

double ctmc_throughput(double mu1, double mu2, double mu3) {
  if (!(mu1 > 0.0 && mu2 > 0.0 && mu3 > 0.0))
    throw std::invalid_argument("ctmc_throughput: rates must be positive");

  const auto states = feasible_states();
  const auto n = static_cast<Eigen::Index>(states.size());
  auto index_of = [&](const LineState& s) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (states[static_cast<std::size_t>(i)] == s) return i;
    throw std::logic_error("ctmc_throughput: transition to infeasible state");
  };

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto s = states[static_cast<std::size_t>(i)];
    auto add = [&](LineState to, double rate) { q(i, index_of(to)) += rate; };
    if (s.s1 == Status::working) {
      if (s.s2 == Status::starved)
        add({Status::working, Status::working, s.s3}, mu1);
      else
        add({Status::blocked, s.s2, s.s3}, mu1);
    }
    if (s.s2 == Status::working) {
      if (s.s3 == Status::starved) {
        // Hand the unit down; a blocked stage 1 refills stage 2 at once.
        const bool refill = s.s1 == Status::blocked;
        add({Status::working, refill ? Status::working : Status::starved, Status::working}, mu2);
      } else {
        add({s.s1, Status::blocked, s.s3}, mu2);
      }
    }
    if (s.s3 == Status::working) {
      if (s.s2 == Status::blocked) {
        const bool refill = s.s1 == Status::blocked;
        add({Status::working, refill ? Status::working : Status::starved, Status::working}, mu3);
      } else {
        add({s.s1, s.s2, Status::starved}, mu3);
      }
    }
    q(i, i) = -q.row(i).sum();
  }

  // pi Q = 0 with sum(pi) = 1: replace the last balance equation.
  Eigen::MatrixXd a = q.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("ctmc_throughput: singular balance system");
  const Eigen::VectorXd pi = lu.solve(b);

  double p_working = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (states[static_cast<std::size_t>(i)].s3 == Status::working) p_working += pi(i);
  return mu3 * p_working;
}

ZTest z_test(double mean, double sd, long n, double mu0, double alpha) {
  if (n <= 30) throw std::invalid_argument("z_test: need more than 30 observations");
  if (!(sd > 0.0)) throw std::domain_error("z_test: degenerate sample (zero spread)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("z_test: alpha outside (0, 1)");
  ZTest t;
  t.z = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  t.critical = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
  t.reject = std::abs(t.z) > t.critical;
  return t;
}

ValidationReport validate_simulator(const SimParams& params, const ValidationOptions& options) {
  params.validate();
  const auto& rates = params.service_rates;

  SimParams line = params;
  line.buffer_caps = {kUnbounded, 0.0, 0.0};
  if (options.simulated_rates) line.service_rates = *options.simulated_rates;

  std::vector<double> output;
  output.reserve(static_cast<std::size_t>(params.recorded_days()));
  const auto seed = replication_seed(params.base_seed, 0xfeedu, 0);
  FlowLine sim(line, ScenarioSpec::normal(), seed, LineOptions{.saturated = true});
  sim.run(params.replication_length, [&](int day, const DayLog& log, const DayAudit&) {
    if (day >= params.warmup) output.push_back(static_cast<double>(log.fulfilled.size()));
  });

  const double n = static_cast<double>(output.size());
  double mean = 0.0;
  for (double k : output) mean += k;
  mean /= n;
  double ss = 0.0;
  for (double k : output) ss += (k - mean) * (k - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  ValidationReport report;
  report.oracle_throughput = ctmc_throughput(rates[0], rates[1], rates[2]);
  report.simulated_mean = mean;
  report.simulated_sd = sd;
  report.alpha = options.alpha;
  report.replications = static_cast<long>(output.size());
  report.test = z_test(mean, sd, report.replications, report.oracle_throughput, options.alpha);
  report.half_width = report.test.critical * sd / std::sqrt(n);
  return report;
}

}  // namespace scdt::sim
