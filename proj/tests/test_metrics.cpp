#include "doctest.h"
#include "scdt/metrics/metrics.hpp"
#include "scdt/random.hpp"

#include <cmath>
#include <stdexcept>

using namespace scdt;
using namespace scdt::metrics;

TEST_CASE("binary metrics hand case") {
  const BinaryCounts c{8, 1, 1, 10};
  CHECK(*accuracy(c) == 0.9);
  CHECK(*precision(c) == 8.0 / 9.0);
  CHECK(*recall(c) == 8.0 / 9.0);
  CHECK(*f1(c) == 8.0 / 9.0);
  const BinaryCounts perfect{5, 0, 0, 7};
  CHECK(*accuracy(perfect) == 1.0);
  CHECK(*precision(perfect) == 1.0);
  CHECK(*recall(perfect) == 1.0);
  CHECK(*f1(perfect) == 1.0);
  const BinaryCounts none{0, 0, 0, 4};
  CHECK_FALSE(precision(none).has_value());
  CHECK_FALSE(recall(none).has_value());
  CHECK(to_json(precision(none)).is_null());
}

TEST_CASE("normal is the positive class") {
  const bool truth[] = {false, false, true, true};
  const bool pred[] = {false, true, false, true};
  const auto c = count_binary(truth, pred);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
}

TEST_CASE("f1 identity and rmse bound on random data") {
  auto rng = substream(3, Stream::init);
  for (int k = 0; k < 200; ++k) {
    const BinaryCounts c{1 + uniform_int(rng, 0, 50), uniform_int(rng, 0, 50), uniform_int(rng, 0, 50),
                         uniform_int(rng, 0, 50)};
    const double p = *precision(c), r = *recall(c);
    CHECK(*f1(c) == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-14));
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = uniform_open(rng) * 10;
      b[i] = uniform_open(rng) * 10;
    }
    const auto e = regression_errors(a, b);
    CHECK(e.rmse >= e.mae - 1e-15);
  }
}

TEST_CASE("regression error hand case") {
  const double y[] = {10, 20}, yhat[] = {9, 22};
  const auto e = regression_errors(y, yhat);
  CHECK(e.mae == 1.5);
  CHECK(e.mse == 2.5);
  CHECK(e.rmse == doctest::Approx(1.5811388300841898).epsilon(1e-15));
  CHECK(*e.mape == doctest::Approx(0.10).epsilon(1e-15));
  const auto z = regression_errors(y, y);
  CHECK(z.mae == 0.0);
  CHECK(z.rmse == 0.0);
  CHECK(*z.mape == 0.0);
  const double y0[] = {0, 10}, p0[] = {1, 11};
  const auto s = regression_errors(y0, p0);
  CHECK(s.mape_skipped == 1);
  CHECK(*s.mape == doctest::Approx(0.1));
  const double one[] = {1};
  CHECK_THROWS_AS(regression_errors(y, one), std::invalid_argument);
}

TEST_CASE("lag statistics") {
  const std::vector<std::optional<int>> lags{4, 4, 23, std::nullopt};
  const auto s = lag_stats(lags);
  CHECK(*s.mean == doctest::Approx(31.0 / 3.0));
  CHECK(*s.median == 4.0);
  CHECK(*s.max == 23.0);
  CHECK(s.undetected == 1);
  CHECK(s.histogram.size() == 2);
  const std::vector<std::optional<int>> zeros{0, 0, 0};
  const auto z = lag_stats(zeros);
  CHECK(*z.mean == 0.0);
  CHECK(*z.median == 0.0);
  CHECK(*z.max == 0.0);
}

TEST_CASE("confusion matrix") {
  const int actual[] = {0, 1, 2, 3, 4, 5};
  const auto perfect = ConfusionMatrix(6, actual, actual);
  for (int c = 0; c < 6; ++c) {
    CHECK(*perfect.f1(c) == 1.0);
    CHECK(perfect.row_total(c) == 1);
  }
  // one Recovery sample predicted Normal
  const int predicted[] = {0, 1, 2, 3, 4, 0};
  const ConfusionMatrix m(6, actual, predicted);
  CHECK(*m.precision(0) == 0.5);
  CHECK(*m.recall(0) == 1.0);
  CHECK(*m.f1(0) == doctest::Approx(2.0 / 3.0));
  CHECK(*m.recall(5) == 0.0);
  CHECK_FALSE(m.precision(5).has_value());
  CHECK(m.accuracy() == doctest::Approx(5.0 / 6.0));
  CHECK(m.largest_confusion() == std::pair<int, int>{5, 0});
  const int short_pred[] = {0};
  CHECK_THROWS(ConfusionMatrix(6, actual, short_pred));
}

TEST_CASE("report schema") {
  const auto j = detection_report("S1-test", "detector", BinaryCounts{1, 2, 3, 4}, nullptr);
  for (const char* k : {"dataset", "model", "counts", "metrics", "lag_stats"}) CHECK(j.contains(k));
}
