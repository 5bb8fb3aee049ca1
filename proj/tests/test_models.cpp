#include "doctest.h"
#include "scdt/models/sequence.hpp"
#include "scdt/pipeline/dataset.hpp"

#include <filesystem>

using namespace scdt;
using namespace scdt::models;

namespace {

pipeline::Dataset small_dataset() {
  pipeline::DatasetConfig cfg;
  cfg.replications = 5;
  return pipeline::simulate_dataset(cfg);
}

data::WindowSet disrupted_windows(const pipeline::Dataset& ds, pipeline::Part part) {
  const auto dis = std::span<const sim::ScenarioId>(sim::kDisruptedScenarios);
  return pipeline::make_window_set(ds, dis, part, pipeline::fit_stats(ds, dis, pipeline::Part::train));
}

}  // namespace

TEST_CASE("classifier outputs a distribution") {
  const auto ds = small_dataset();
  const auto set = disrupted_windows(ds, pipeline::Part::test);
  auto net = build_classifier(ClassifierSpec{}, set.input_features(), 4);
  const auto out = classify(net, set);
  REQUIRE(out.size() == set.size());
  for (std::size_t i = 0; i < out.size(); i += 97) {
    CHECK(std::abs(out[i].probabilities.sum() - 1.0) < 1e-12);
    CHECK(out[i].label == data::from_one_hot(out[i].probabilities));
  }
  const auto cm = confusion(set, out);
  const auto census = class_census(set);
  for (int k = 0; k < data::kNumClasses; ++k) CHECK(cm.row_total(k) == census[static_cast<std::size_t>(k)]);
}

TEST_CASE("classifier rejects a training set missing classes") {
  const auto ds = small_dataset();
  std::array<sim::ScenarioId, 1> s1{sim::ScenarioId::supplier_loss};
  const auto set = pipeline::make_window_set(ds, s1, pipeline::Part::train,
                                             pipeline::fit_stats(ds, s1, pipeline::Part::train));
  const auto census = class_census(set);
  CHECK(census[static_cast<std::size_t>(data::PhaseClass::surge_demand)] == 0);
  CHECK_THROWS_AS(train_classifier(ClassifierSpec{}, set, nullptr, 1), std::invalid_argument);
  const auto normal_only =
      set.filter([](const data::WindowSet& s, std::size_t i) { return !s.anomalous(i); });
  CHECK_THROWS_AS(require_all_classes(class_census(normal_only)), std::invalid_argument);
}

TEST_CASE("classifier training is reproducible") {
  const auto ds = small_dataset();
  auto train = disrupted_windows(ds, pipeline::Part::train);
  train = train.filter([](const data::WindowSet&, std::size_t i) { return i % 20 == 0; });
  ClassifierSpec spec;
  spec.epochs = 2;
  auto a = train_classifier(spec, train, nullptr, 9);
  auto b = train_classifier(spec, train, nullptr, 9);
  CHECK(a.result.curve.train == b.result.curve.train);
  const auto test = disrupted_windows(ds, pipeline::Part::test);
  const auto pa = classify(a.net, test), pb = classify(b.net, test);
  for (std::size_t i = 0; i < pa.size(); ++i) REQUIRE(pa[i].probabilities == pb[i].probabilities);
}

TEST_CASE("ttr regressors train on positive targets only") {
  const auto ds = small_dataset();
  std::array<sim::ScenarioId, 1> s3{sim::ScenarioId::distributor_loss};
  const auto stats = pipeline::fit_stats(ds, s3, pipeline::Part::train);
  const auto train = pipeline::make_window_set(ds, s3, pipeline::Part::train, stats);
  const auto test = pipeline::make_window_set(ds, s3, pipeline::Part::test, stats);
  const double scale = pipeline::max_train_ttr(ds, sim::ScenarioId::distributor_loss);
  CHECK(scale > 30);
  TtrSpec spec;
  spec.epochs = 1;
  auto m = train_ttr(sim::ScenarioId::distributor_loss, spec, train, test, data::TtrTransform{scale, true}, {sim::kWip, sim::kDailyOutput}, 2);
  CHECK(m.net.layer(0).parameters().size() > 0);
  auto eval = test;
  eval.select_features(m.features);
  const auto p = m.predict(eval);
  REQUIRE(p.size() == eval.size());
  for (double v : p) CHECK(v >= 0.0);

  auto copy = ttr_from_json(to_json(m));
  CHECK(copy.scenario == sim::ScenarioId::distributor_loss);
  CHECK(copy.features == m.features);
  CHECK(copy.target.log);
  CHECK(copy.predict(eval) == p);

  const auto zero = train.filter([](const data::WindowSet& s, std::size_t i) { return s.ttr(i) == 0; });
  CHECK_THROWS_AS(train_ttr(sim::ScenarioId::distributor_loss, spec, zero, std::nullopt, data::TtrTransform{scale}, {}, 2),
                  std::invalid_argument);
  CHECK_THROWS(train_ttr(sim::ScenarioId::normal, spec, train, std::nullopt, data::TtrTransform{scale}, {}, 2));
}

TEST_CASE("trace csv round trip is exact") {
  const auto ds = small_dataset();
  const auto root = std::filesystem::temp_directory_path() / "scdt_trace_test";
  std::filesystem::remove_all(root);
  pipeline::write_traces(root, ds);
  const auto back = pipeline::read_traces(root, ds.config);
  for (auto id : sim::kAllScenarios) {
    const auto& a = ds.at(id);
    const auto& b = back.at(id);
    REQUIRE(a.traces.size() == b.traces.size());
    CHECK(a.split.test == b.split.test);
    for (std::size_t r = 0; r < a.traces.size(); ++r) {
      CHECK(a.traces[r].scenario.window.has_value() == b.traces[r].scenario.window.has_value());
      for (std::size_t d = 0; d < a.traces[r].records.size(); ++d) {
        REQUIRE(a.traces[r].records[d].day == b.traces[r].records[d].day);
        REQUIRE(a.traces[r].records[d].features == b.traces[r].records[d].features);
      }
      CHECK(a.labels[r].records.back().ttr == b.labels[r].records.back().ttr);
    }
  }
  std::filesystem::remove_all(root);
}
