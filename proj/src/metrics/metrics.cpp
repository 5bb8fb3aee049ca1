#include "scdt/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace scdt::metrics {

BinaryCounts& BinaryCounts::operator+=(const BinaryCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

namespace {
Metric ratio(long num, long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

Metric accuracy(const BinaryCounts& c) { return ratio(c.tp + c.tn, c.total()); }
Metric precision(const BinaryCounts& c) { return ratio(c.tp, c.tp + c.fp); }
Metric recall(const BinaryCounts& c) { return ratio(c.tp, c.tp + c.fn); }

Metric f1(const BinaryCounts& c) {
  // 2TP / (2TP + FP + FN), equal to 2PR / (P + R) when both are defined
  return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
}

BinaryCounts count_binary(std::span<const bool> truth, std::span<const bool> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("count_binary: length mismatch");
  BinaryCounts c;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (!truth[k]) (predicted[k] ? c.fn : c.tp)++;
    else (predicted[k] ? c.tn : c.fp)++;
  }
  return c;
}

RegressionErrors regression_errors(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("regression_errors: length mismatch");
  if (actual.empty()) throw std::invalid_argument("regression_errors: empty input");
  RegressionErrors e;
  e.count = static_cast<long>(actual.size());
  double ape = 0.0;
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const double d = actual[k] - predicted[k];
    e.mae += std::abs(d);
    e.mse += d * d;
    if (actual[k] == 0.0) {
      ++e.mape_skipped;
    } else {
      ape += std::abs(d / actual[k]);
      ++e.mape_count;
    }
  }
  const double n = static_cast<double>(actual.size());
  e.mae /= n;
  e.mse /= n;
  e.rmse = std::sqrt(e.mse);
  if (e.mape_count > 0) e.mape = ape / static_cast<double>(e.mape_count);
  return e;
}

LagStats lag_stats(std::span<const std::optional<int>> lags) {
  LagStats s;
  std::vector<int> seen;
  std::map<int, long> hist;
  for (const auto& l : lags) {
    if (!l) {
      ++s.undetected;
      continue;
    }
    seen.push_back(*l);
    ++hist[*l];
  }
  s.detected = static_cast<long>(seen.size());
  if (seen.empty()) return s;
  std::sort(seen.begin(), seen.end());
  double sum = 0.0;
  for (int l : seen) sum += l;
  s.mean = sum / static_cast<double>(seen.size());
  const std::size_t mid = seen.size() / 2;
  s.median = seen.size() % 2 == 1 ? seen[mid] : 0.5 * (seen[mid - 1] + seen[mid]);
  s.max = seen.back();
  s.histogram.assign(hist.begin(), hist.end());
  return s;
}

ConfusionMatrix::ConfusionMatrix(int classes) {
  if (classes < 1) throw std::invalid_argument("ConfusionMatrix: need at least one class");
  counts_ = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>::Zero(classes, classes);
}

ConfusionMatrix::ConfusionMatrix(int classes, std::span<const int> actual, std::span<const int> predicted)
    : ConfusionMatrix(classes) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("confusion: length mismatch");
  for (std::size_t k = 0; k < actual.size(); ++k) add(actual[k], predicted[k]);
}

void ConfusionMatrix::add(int actual, int predicted) {
  if (actual < 0 || actual >= classes() || predicted < 0 || predicted >= classes())
    throw std::out_of_range("confusion: class index out of range");
  ++counts_(actual, predicted);
}

BinaryCounts ConfusionMatrix::one_vs_rest(int c) const {
  BinaryCounts b;
  b.tp = counts_(c, c);
  b.fn = counts_.row(c).sum() - b.tp;
  b.fp = counts_.col(c).sum() - b.tp;
  b.tn = counts_.sum() - b.tp - b.fn - b.fp;
  return b;
}

double ConfusionMatrix::accuracy() const {
  const long t = total();
  return t == 0 ? 0.0 : static_cast<double>(counts_.trace()) / static_cast<double>(t);
}

std::pair<int, int> ConfusionMatrix::largest_confusion() const {
  std::pair<int, int> best{-1, -1};
  long most = -1;
  for (int a = 0; a < classes(); ++a)
    for (int p = 0; p < classes(); ++p)
      if (a != p && counts_(a, p) > most) {
        most = counts_(a, p);
        best = {a, p};
      }
  return best;
}

nlohmann::json to_json(const Metric& m) { return m ? nlohmann::json(*m) : nlohmann::json(nullptr); }

nlohmann::json to_json(const BinaryCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

nlohmann::json to_json(const RegressionErrors& e) {
  return {{"mae", e.mae},           {"mse", e.mse},
          {"rmse", e.rmse},         {"mape", to_json(e.mape)},
          {"mape_count", e.mape_count}, {"mape_skipped_zero", e.mape_skipped},
          {"count", e.count}};
}

nlohmann::json to_json(const LagStats& s) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [lag, n] : s.histogram) hist.push_back({{"lag", lag}, {"replications", n}});
  return {{"detected", s.detected}, {"undetected", s.undetected}, {"mean", to_json(s.mean)},
          {"median", to_json(s.median)}, {"max", to_json(s.max)}, {"histogram", hist}};
}

nlohmann::json detection_report(const std::string& dataset, const std::string& model,
                                const BinaryCounts& counts, const LagStats* lags) {
  return {{"dataset", dataset},
          {"model", model},
          {"counts", to_json(counts)},
          {"metrics",
           {{"accuracy", to_json(accuracy(counts))},
            {"precision", to_json(precision(counts))},
            {"recall", to_json(recall(counts))},
            {"f1", to_json(f1(counts))}}},
          {"lag_stats", lags ? to_json(*lags) : nlohmann::json(nullptr)}};
}

}  // namespace scdt::metrics
