#include "doctest.h"
#include "scdt/data/sources.hpp"
#include "scdt/detect/autoencoder.hpp"
#include "scdt/detect/detector.hpp"

#include <filesystem>
#include <fstream>
#include <string>

using namespace scdt;
using namespace scdt::detect;

namespace {

// 30 days from day 390 with a window starting at day 400; every value of a
// day equals the day offset / 100.
data::NormalizedSeries synthetic_series(sim::ScenarioId id, std::optional<int> onset) {
  data::NormalizedSeries s;
  s.scenario = id;
  s.first_day = 390;
  if (onset) s.window = sim::DisruptionWindow{*onset, 10};
  s.values.resize(30, sim::kNumFeatures);
  for (int d = 0; d < 30; ++d) {
    s.values.row(d).setConstant(d / 100.0);
    const bool inside = onset && 390 + d >= *onset && 390 + d < *onset + 10;
    s.labels.push_back(inside ? data::disruption_class(id) : data::PhaseClass::normal);
    s.ttr.push_back(inside ? *onset + 10 - (390 + d) : 0);
  }
  return s;
}

}  // namespace

TEST_CASE("reconstruction error hand case") {
  nn::Matrix x(1, 4), y(1, 4);
  x << 1, 2, 3, 4;
  y << 0, 2, 5, 4;
  const auto e = reconstruction_error(x, y, 2);
  REQUIRE(e.cols() == 2);
  CHECK(e(0, 0) == 1.5);
  CHECK(e(0, 1) == 0.0);
  const auto full = reconstruction_error(x, y, 2, ErrorMode::elementwise);
  CHECK(full.cols() == 4);
  CHECK(full(0, 2) == 2.0);
  CHECK(reconstruction_error(x, x, 2).isZero());
  CHECK_THROWS_AS(reconstruction_error(x, y, 3), std::invalid_argument);
  CHECK(parse_error_mode(to_string(ErrorMode::elementwise)) == ErrorMode::elementwise);
}

TEST_CASE("autoencoder shape is symmetric") {
  auto ae = build_autoencoder(AutoencoderSpec{}, 3);
  CHECK(ae.size() == 8);
  nn::Matrix x = nn::Matrix::Constant(2, 182, 0.5);
  const auto y = ae.predict(x);
  CHECK(y.cols() == 182);
  CHECK(y.minCoeff() > 0.0);
  CHECK(y.maxCoeff() < 1.0);
  CHECK(ae.parameter_count() ==
        2 * (182 * 256 + 256 * 128 + 128 * 64 + 64 * 32) + 256 + 128 + 64 + 32 + 256 + 128 + 64 + 182);
}

TEST_CASE("batch sources materialize targets") {
  data::WindowSet set;
  set.add_series(synthetic_series(sim::ScenarioId::supplier_loss, 400));
  REQUIRE(set.size() == 17);
  const std::vector<std::size_t> ids{0, 16};
  const auto rec = data::ReconstructionSource(set).batch(ids);
  CHECK(rec.input.size() == 1);
  CHECK(rec.input[0] == rec.target);
  const auto cls = data::ClassSource(set).batch(ids);
  CHECK(cls.input.size() == 14);
  CHECK(cls.target.row(0).sum() == 1.0);
  CHECK(cls.target(0, static_cast<int>(set.label(0))) == 1.0);
  const auto ttr = data::TtrSource(set, {10.0}).batch(ids);
  CHECK(ttr.target(0, 0) == doctest::Approx(set.ttr(0) / 10.0));
  CHECK_THROWS(data::TtrSource(set, {0.0}));
  const data::TtrTransform log{400.0, true};
  CHECK(log.forward(400.0) == doctest::Approx(1.0));
  CHECK(log.inverse(log.forward(37.0)) == doctest::Approx(37.0).epsilon(1e-12));
  CHECK(log.inverse(-1.0) == 0.0);
}

TEST_CASE("lag and false alarms from flags") {
  data::WindowSet set;
  set.add_series(synthetic_series(sim::ScenarioId::supplier_loss, 400));
  set.add_series(synthetic_series(sim::ScenarioId::normal, std::nullopt));
  // Windows end on days 403..419; only the day-403 window is inside the boundary.
  Eigen::VectorXd scores(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) scores(static_cast<Eigen::Index>(i)) = set.end_day(i);
  OcsvmModel svm;  // decision = K(s, x) - rho: normal only near 0
  svm.gamma = 1.0;
  svm.support = Eigen::VectorXd::Constant(1, 403.0);
  svm.alpha = Eigen::VectorXd::Constant(1, 1.0);
  svm.rho = 0.5;
  const auto out = assemble_detections(set, scores, svm);
  REQUIRE(out.size() == 2);
  CHECK(out[0].end_day.front() == 403);
  CHECK_FALSE(out[0].flagged.front());
  CHECK(out[0].flagged[1]);
  CHECK(out[0].lag == 4);
  CHECK(out[0].false_alarms == 0);
  CHECK(out[0].pre_onset_windows == 0);
  CHECK_FALSE(out[1].lag);
  CHECK(out[1].false_alarms == 16);
  CHECK(out[1].pre_onset_windows == 17);
  CHECK(lags(out).size() == 1);
  CHECK(false_alarm_percent(out) == doctest::Approx(100.0 * 16 / 17));
  CHECK(flag_fraction(out) == doctest::Approx(32.0 / 34.0));
  const auto c = window_counts(out);
  CHECK(c.total() == 34);
  CHECK(c.tp == 1);   // normal windows flagged normal: day 403 of S0
  CHECK(c.fp == 1);   // disrupted window 403 flagged normal
}

TEST_CASE("first flag four days after onset gives lag four") {
  data::WindowSet set;
  set.add_series(synthetic_series(sim::ScenarioId::manufacturer_loss, 400));
  Eigen::VectorXd scores(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i)
    scores(static_cast<Eigen::Index>(i)) = set.end_day(i) >= 404 ? 10.0 : 0.0;
  OcsvmModel svm;
  svm.gamma = 1.0;
  svm.support = Eigen::VectorXd::Zero(1);
  svm.alpha = Eigen::VectorXd::Ones(1);
  svm.rho = 0.5;
  CHECK(assemble_detections(set, scores, svm)[0].lag == 4);
}

TEST_CASE("grid search records every cell") {
  data::WindowSet set;
  set.add_series(synthetic_series(sim::ScenarioId::supplier_loss, 400));
  Eigen::VectorXd scores(static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) scores(static_cast<Eigen::Index>(i)) = set.anomalous(i) ? 5.0 : 0.0;
  std::vector<double> fit(40);
  for (std::size_t i = 0; i < fit.size(); ++i) fit[i] = 0.01 * static_cast<double>(i % 7);
  const auto cells = grid_search({0.1, 0.5}, {1.0, 10.0}, fit, set, scores);
  CHECK(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.error.empty());
    CHECK(c.accuracy.has_value());
  }
  CHECK(cells[0].mean_lag == 3.0);  // first window ends on day 403
  const auto path = std::filesystem::temp_directory_path() / "scdt_grid_test.csv";
  write_grid_csv(path, cells);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "nu,gamma,accuracy,f1,mean_lag,max_lag,false_alarm_pct,error");
  std::filesystem::remove(path);
  CHECK_THROWS(grid_search({}, {1.0}, fit, set, scores));
}

TEST_CASE("pca and stats json round trip") {
  Pca1<double> p;
  p.mean = Eigen::VectorXd::LinSpaced(3, 0, 1);
  p.axis = Eigen::VectorXd::Unit(3, 1);
  p.eigenvalue = 0.3;
  p.explained_ratio = 0.9;
  const auto q = pca_from_json(to_json(p));
  CHECK(q.mean == p.mean);
  CHECK(q.axis == p.axis);
  CHECK(q.explained_ratio == 0.9);
  data::NormalizationStats s{p.mean, p.mean * 2};
  CHECK(stats_from_json(to_json(s)).max == s.max);
}
