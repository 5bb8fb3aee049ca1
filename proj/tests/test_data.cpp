#include "doctest.h"
#include "scdt/data/labels.hpp"
#include "scdt/data/normalize.hpp"
#include "scdt/data/split.hpp"
#include "scdt/data/windows.hpp"
#include "scdt/sim/simulator.hpp"

#include <algorithm>
#include <set>

using namespace scdt;
using namespace scdt::data;

namespace {

sim::ReplicationTrace synthetic_trace(int onset, int duration, const std::vector<double>& wip) {
  sim::ReplicationTrace t;
  t.scenario = sim::ScenarioSpec::disrupted(sim::ScenarioId::supplier_loss, onset, duration);
  for (std::size_t k = 0; k < wip.size(); ++k) {
    sim::DailyRecord r;
    r.day = static_cast<int>(k);
    r.features[sim::kWip] = wip[k];
    r.features[sim::kDailyOutput] = static_cast<double>(k);
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("one-hot encoding") {
  CHECK(one_hot(PhaseClass::normal) == (OneHot() << 1, 0, 0, 0, 0, 0).finished());
  for (int c = 0; c < kNumClasses; ++c) {
    const auto v = one_hot(class_from_index(c));
    CHECK(v.sum() == 1.0);
    CHECK(from_one_hot(v) == class_from_index(c));
  }
  CHECK_THROWS_AS(class_from_index(6), std::out_of_range);
  CHECK_THROWS_AS(class_from_index(-1), std::out_of_range);
}

TEST_CASE("label arithmetic with a known recovery day") {
  std::vector<double> wip(600, 5.0);
  for (int d = 400; d < 470; ++d) wip[d] = 50.0;
  const auto t = synthetic_trace(400, 40, wip);
  const auto lt = label_trace(t, RecoveryRule{});
  REQUIRE(lt.recovery);
  CHECK(lt.recovery->recovery_day == 470);
  CHECK_FALSE(lt.recovery->censored);
  CHECK(lt.records[399].label == PhaseClass::normal);
  CHECK(lt.records[400].label == PhaseClass::supplier_loss);
  CHECK(lt.records[439].label == PhaseClass::supplier_loss);
  CHECK(lt.records[440].label == PhaseClass::recovery);
  CHECK(lt.records[469].label == PhaseClass::recovery);
  CHECK(lt.records[470].label == PhaseClass::normal);
  CHECK(lt.records[400].ttr == 70);
  CHECK(lt.records[469].ttr == 1);
  CHECK(lt.records[470].ttr == 0);
  CHECK(lt.records[399].ttr == 0);
  for (const auto& r : lt.records) CHECK(r.anomalous == (r.label != PhaseClass::normal));
  for (int d = 401; d < 470; ++d) CHECK(lt.records[d].ttr == lt.records[d - 1].ttr - 1);
}

TEST_CASE("recovery requires consecutive days under the band") {
  std::vector<double> wip(600);
  for (int d = 0; d < 600; ++d) wip[d] = d % 2;  // baseline 0/1, p95 = 1
  for (int d = 400; d < 500; ++d) wip[d] = 9.0;
  wip[480] = 0.0;  // single dip inside the excursion
  wip[481] = 0.0;
  const auto info = find_recovery(synthetic_trace(400, 30, wip), RecoveryRule{});
  CHECK(info.wip_threshold == doctest::Approx(1.0));
  CHECK(info.recovery_day == 500);
}

TEST_CASE("unrecovered trace is censored at its last day") {
  std::vector<double> wip(500, 1.0);
  for (int d = 400; d < 500; ++d) wip[d] = 99.0;
  const auto lt = label_trace(synthetic_trace(400, 30, wip), RecoveryRule{});
  CHECK(lt.recovery->censored);
  CHECK(lt.recovery->recovery_day == 499);
  CHECK(lt.records[498].ttr == 1);
}

TEST_CASE("normal trace is all Normal with zero ttr") {
  sim::SimParams p;
  const auto t = sim::run_replication(p, sim::ScenarioSpec::normal(), 0);
  const auto lt = label_trace(t, RecoveryRule{});
  CHECK_FALSE(lt.recovery);
  for (const auto& r : lt.records) {
    CHECK(r.label == PhaseClass::normal);
    CHECK(r.ttr == 0);
  }
}

TEST_CASE("percentile interpolates") {
  CHECK(percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(percentile({0, 10}, 0.95) == doctest::Approx(9.5));
  CHECK(percentile({3, 1, 2}, 1.0) == 3.0);
}

TEST_CASE("min-max scaling") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 1, 5, 1, 10, 1;
  const auto s = fit_minmax(x);
  const auto n = apply_minmax(s, x);
  CHECK(n(0, 0) == 0.0);
  CHECK(n(1, 0) == 0.5);
  CHECK(n(2, 0) == 1.0);
  CHECK(n.col(1).isZero());
  CHECK(s.constant_features() == std::vector<Eigen::Index>{1});

  Eigen::MatrixXd test(2, 2);
  test << 12, 1, -3, 1;
  const auto c = apply_minmax(s, test);
  CHECK(c(0, 0) == 1.0);
  CHECK(c(1, 0) == 0.0);

  Eigen::MatrixXd r(4, 3);
  r << 0.3, 1e3, -7, 2.1, 5e2, 3, 0.9, 7e2, 1, 1.7, 2e2, -2;
  const auto sr = fit_minmax(r);
  const auto back = invert_minmax(sr, apply_minmax(sr, r));
  CHECK((back - r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("min-max is templated on the scalar") {
  Eigen::MatrixXf x(2, 1);
  x << 1.0f, 3.0f;
  const auto s = fit_minmax(x);
  const auto n = apply_minmax(s, x);
  static_assert(std::is_same_v<decltype(n)::Scalar, float>);
  CHECK(n(1, 0) == 1.0f);
}

TEST_CASE("split sizes and determinism") {
  const auto a = split_dataset(300, SplitSpec{}, 7);
  CHECK(a.train.size() == 180);
  CHECK(a.validation.size() == 60);
  CHECK(a.test.size() == 60);
  const auto b = split_dataset(5, SplitSpec{}, 7);
  CHECK(b.train.size() == 3);
  CHECK(b.validation.size() == 1);
  CHECK(b.test.size() == 1);
  const auto c = split_dataset(300, SplitSpec{}, 7);
  CHECK(a.train == c.train);
  CHECK(a.test == c.test);
  std::set<int> all(a.train.begin(), a.train.end());
  all.insert(a.validation.begin(), a.validation.end());
  all.insert(a.test.begin(), a.test.end());
  CHECK(all.size() == 300);
  CHECK_THROWS(split_dataset(4, SplitSpec{}, 1));
  CHECK_THROWS(SplitSpec{0.5, 0.2, 0.2}.validate());
}

TEST_CASE("windows over a full series") {
  sim::SimParams p;
  const auto t = sim::run_replication(p, sim::sample_scenario(p, sim::ScenarioId::supplier_loss, 0), 0);
  const auto lt = label_trace(t, RecoveryRule{});
  RowMatrix raw = feature_matrix(t);
  const auto stats = fit_minmax(raw);
  const auto series = normalize_series(t, lt, stats);
  const auto windows = make_windows(series);
  CHECK(windows.size() == 903);
  CHECK(windows.front().flattened().size() == 182);
  CHECK(windows.front().end_day == 193);
  CHECK(windows.back().label == lt.records.back().label);

  const auto& w = windows[300];
  const auto flat = w.flattened();
  CHECK(flat(13) == w.values(1, 0));
  CHECK(flat(2 * 13 + 5) == w.values(2, 5));
  CHECK(w.label == lt.records[300 + 13].label);
  CHECK(w.ttr == lt.records[300 + 13].ttr);
  for (const auto& win : windows) {
    CHECK(win.values.minCoeff() >= 0.0);
    CHECK(win.values.maxCoeff() <= 1.0);
  }

  WindowSet set;
  set.add_series(series);
  CHECK(set.size() == 903);
  const std::vector<std::size_t> ids{0, 300, 902};
  const auto flat_batch = set.flat_batch(ids);
  CHECK(flat_batch.row(1).transpose() == flat);
  const auto seq = set.sequence_batch(ids);
  CHECK(seq.size() == 14);
  CHECK(seq[2](1, 5) == w.values(2, 5));
  CHECK(set.label(300) == w.label);

  auto exact = series;
  exact.values = exact.values.topRows(14).eval();
  exact.labels.resize(14);
  exact.ttr.resize(14);
  CHECK(make_windows(exact).size() == 1);
  exact.values = exact.values.topRows(10).eval();
  exact.labels.resize(10);
  exact.ttr.resize(10);
  CHECK(make_windows(exact).empty());
}

TEST_CASE("window sets filter and select features") {
  sim::SimParams p;
  const auto t = sim::run_replication(p, sim::sample_scenario(p, sim::ScenarioId::demand_surge, 1), 1);
  const auto lt = label_trace(t, RecoveryRule{});
  const auto series = normalize_series(t, lt, fit_minmax(feature_matrix(t)));
  WindowSet set;
  set.add_series(series);
  set.add_series(series);
  CHECK(set.size() == 2 * 903);
  CHECK(set.by_series().size() == 2);
  const auto positive = set.filter([](const WindowSet& s, std::size_t i) { return s.ttr(i) > 0; });
  CHECK(positive.size() > 0);
  for (std::size_t i = 0; i < positive.size(); ++i) CHECK(positive.ttr(i) > 0);
  set.select_features({sim::kWip, sim::kDailyOutput});
  CHECK(set.input_features() == 2);
  const std::vector<std::size_t> ids{5};
  CHECK(set.flat_batch(ids).cols() == 28);
}
