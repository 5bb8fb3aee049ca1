#include "doctest.h"
#include "scdt/sim/invariants.hpp"
#include "scdt/sim/simulator.hpp"
#include "scdt/sim/validation.hpp"

#include <cmath>
#include <stdexcept>

using namespace scdt;
using namespace scdt::sim;

TEST_CASE("effective rate inside and outside the window") {
  SimParams p;
  const auto s1 = ScenarioSpec::disrupted(ScenarioId::supplier_loss, 400, 40);
  CHECK(effective_rate(18.0, s1, 410.5, RateRole::stage1, p) == 0.0);
  CHECK(effective_rate(18.0, s1, 399.9, RateRole::stage1, p) == 18.0);
  CHECK(effective_rate(18.0, s1, 440.0, RateRole::stage1, p) == 18.0);
  CHECK(effective_rate(19.0, s1, 410.5, RateRole::stage2, p) == 19.0);
  CHECK(effective_rate(15.0, s1, 410.5, RateRole::arrival, p) == 15.0);

  const auto s4 = ScenarioSpec::disrupted(ScenarioId::demand_surge, 400, 40);
  CHECK(effective_rate(15.0, s4, 420.0, RateRole::arrival, p) == 30.0);
  CHECK(effective_rate(18.0, s4, 420.0, RateRole::stage1, p) == 18.0);

  for (double t : {0.0, 420.0, 1000.0})
    CHECK(effective_rate(19.0, ScenarioSpec::normal(), t, RateRole::stage2, p) == 19.0);
}

TEST_CASE("params validation") {
  SimParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.arrival_rate = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.warmup = 1095;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.onset_max = 1040;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(p.recorded_days() == 916);
}

TEST_CASE("scenario names round trip") {
  for (auto id : kAllScenarios) CHECK(parse_scenario(to_string(id)) == id);
  CHECK_THROWS(parse_scenario("S9"));
}

TEST_CASE("aggregate_day means and carry-forward") {
  DayLog log;
  for (int h = 0; h < 24; ++h) log.snapshots.push_back(Snapshot{5.0, {0, 2, 1}});
  OrderTimes a, b;
  a.arrival = 1.0;
  a.service_start = {1.5, 2.0, 2.5};
  a.service_end = {1.8, 2.4, 2.9};
  a.fulfilled = 4.0;
  a.interarrival = 0.1;
  b = a;
  b.arrival = 0.0;
  b.interarrival = 0.3;
  log.fulfilled = {a, b};
  const auto r = aggregate_day(3, log, nullptr);
  CHECK(r.features[kWip] == 5.0);
  CHECK(r.features[kQueueManufacturer] == 2.0);
  CHECK(r.features[kLeadTime] == doctest::Approx(3.5));  // LT 3 and 4
  CHECK(r.features[kFlowTime] == doctest::Approx(2.5));
  CHECK(r.features[kWaitingTime] == doctest::Approx(1.0));
  CHECK(r.features[kProcessingTime] == doctest::Approx(0.3 + 0.4 + 0.4));
  CHECK(r.features[kInterarrival] == doctest::Approx(0.2));
  CHECK(r.features[kDailyOutput] == 2.0);

  DayLog blocked;
  for (int h = 0; h < 24; ++h) blocked.snapshots.push_back(Snapshot{h < 12 ? 8.0 : 10.0, {}});
  const auto q = aggregate_day(4, blocked, &r);
  CHECK(q.features[kDailyOutput] == 0.0);
  CHECK(q.features[kWip] == 9.0);
  CHECK(q.features[kLeadTime] == r.features[kLeadTime]);
  CHECK(q.features[kProcSupplier] == r.features[kProcSupplier]);
}

TEST_CASE("normal replication has 916 clean records") {
  SimParams p;
  const auto t = run_replication(p, ScenarioSpec::normal(), 0);
  CHECK(t.records.size() == 916);
  CHECK(t.records.front().day == 180);
  CHECK(t.records.back().day == 1095);
  CHECK(check_invariants(t, p).empty());
}

TEST_CASE("manufacturer loss fills the manufacturer buffer and stops output") {
  SimParams p;
  const auto t = run_replication(p, ScenarioSpec::disrupted(ScenarioId::manufacturer_loss, 400, 45), 1);
  CHECK(check_invariants(t, p).empty());
  double peak_q2 = 0.0, late_output = 0.0;
  for (const auto& r : t.records) {
    if (r.day >= 410 && r.day < 445) {
      peak_q2 = std::max(peak_q2, r.features[kQueueManufacturer]);
      late_output += r.features[kDailyOutput];
    }
  }
  CHECK(peak_q2 == 15.0);
  CHECK(late_output == 0.0);
}

TEST_CASE("each disrupted scenario passes the invariants") {
  SimParams p;
  for (auto id : kDisruptedScenarios) {
    CAPTURE(to_string(id));
    const auto t = run_replication(p, sample_scenario(p, id, 3), 3);
    const auto v = check_invariants(t, p);
    CHECK(v.empty());
    if (!v.empty()) MESSAGE(v.front());
  }
}

TEST_CASE("zero arrival rate produces nothing") {
  SimParams p;
  p.arrival_rate = 0.0;
  const auto t = run_replication(p, ScenarioSpec::normal(), 0);
  for (const auto& r : t.records)
    for (double f : r.features) CHECK(f == 0.0);
}

TEST_CASE("replications are deterministic") {
  SimParams p;
  const auto s = sample_scenario(p, ScenarioId::distributor_loss, 2);
  const auto a = run_replication(p, s, 2);
  const auto b = run_replication(p, s, 2);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].features == b.records[k].features);
}

TEST_CASE("onset and duration sampling") {
  SimParams p;
  double onset = 0, duration = 0;
  const int n = 10000;
  for (int r = 0; r < n; ++r) {
    const auto s = sample_scenario(p, ScenarioId::supplier_loss, r);
    REQUIRE(s.window);
    CHECK(s.window->onset >= 300);
    CHECK(s.window->onset <= 600);
    CHECK(s.window->duration >= 30);
    CHECK(s.window->duration <= 60);
    onset += s.window->onset;
    duration += s.window->duration;
  }
  CHECK(onset / n == doctest::Approx(450).epsilon(0.01));
  CHECK(duration / n == doctest::Approx(45).epsilon(0.01));
  CHECK_FALSE(sample_scenario(p, ScenarioId::normal, 0).window);
}

TEST_CASE("ctmc oracle") {
  CHECK(ctmc_throughput(18, 19, 20) == doctest::Approx(10.69).epsilon(0.0005));
  CHECK(ctmc_throughput(18, 19, 20) < 18.0);
  CHECK(ctmc_throughput(18, 19, 20) == doctest::Approx(ctmc_throughput(20, 19, 18)).epsilon(1e-12));
  CHECK(ctmc_throughput(5, 1e7, 1e7) == doctest::Approx(5.0).epsilon(1e-5));
  CHECK_THROWS_AS(ctmc_throughput(0, 1, 1), std::invalid_argument);
}

TEST_CASE("ctmc oracle agrees with a long saturated simulation at unit rates") {
  SimParams p;
  p.service_rates = {1.0, 1.0, 1.0};
  p.buffer_caps = {kUnbounded, 0.0, 0.0};
  FlowLine line(p, ScenarioSpec::normal(), 99, LineOptions{true, 1});
  const int days = 5'000'000;
  std::int64_t done = 0;
  line.run(days - 1, [&](int, const DayLog& log, const DayAudit&) { done += static_cast<std::int64_t>(log.fulfilled.size()); });
  const double rate = static_cast<double>(done) / days;
  CHECK(rate == doctest::Approx(ctmc_throughput(1, 1, 1)).epsilon(0.005));
}

TEST_CASE("z test hand cases") {
  const auto t = z_test(10.0, 1.0, 100, 10.5, 0.01);
  CHECK(t.z == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(t.reject);
  CHECK(t.critical == doctest::Approx(2.5758293035489).epsilon(1e-10));
  const auto same = z_test(10.69, 1.0, 916, 10.69, 0.01);
  CHECK(same.z == 0.0);
  CHECK_FALSE(same.reject);
  // 10.48 +/- 0.221 at 99% over 916 runs
  const double sd = 0.221 / 2.5758293035489 * std::sqrt(916.0);
  CHECK_FALSE(z_test(10.48, sd, 916, 10.69, 0.01).reject);
  CHECK_THROWS_AS(z_test(1, 0, 100, 1, 0.01), std::domain_error);
  CHECK_THROWS_AS(z_test(1, 1, 30, 1, 0.01), std::invalid_argument);
}

TEST_CASE("validation detects a halved distributor rate") {
  SimParams p;
  ValidationOptions opts;
  opts.simulated_rates = std::array<double, 3>{18, 19, 10};
  const auto r = validate_simulator(p, opts);
  CHECK(r.test.reject);
}
