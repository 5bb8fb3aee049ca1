#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

namespace scdt::metrics {

/// Confusion counts with *normal* as the positive class: TP is a normal
/// window flagged normal, FN a normal window flagged anomalous.
struct BinaryCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  [[nodiscard]] long total() const { return tp + fp + fn + tn; }
  BinaryCounts& operator+=(const BinaryCounts& o);
};

/// Empty when the denominator is zero.
using Metric = std::optional<double>;

Metric accuracy(const BinaryCounts& c);
Metric precision(const BinaryCounts& c);
Metric recall(const BinaryCounts& c);
Metric f1(const BinaryCounts& c);

BinaryCounts count_binary(std::span<const bool> truth_anomalous,
                          std::span<const bool> predicted_anomalous);

struct RegressionErrors {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  Metric mape;              // fraction, over non-zero actual values only
  long mape_count = 0;      // elements used by MAPE
  long mape_skipped = 0;    // zero actual values left out of MAPE
  long count = 0;
};

/// Throws std::invalid_argument on unequal or empty inputs.
RegressionErrors regression_errors(std::span<const double> actual, std::span<const double> predicted);

struct LagStats {
  long detected = 0;
  long undetected = 0;
  Metric mean;
  Metric median;
  Metric max;
  std::vector<std::pair<int, long>> histogram;  // (lag, replications), ascending lag
};

LagStats lag_stats(std::span<const std::optional<int>> lags);

/// Square count matrix, rows actual, columns predicted.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);
  ConfusionMatrix(int classes, std::span<const int> actual, std::span<const int> predicted);

  void add(int actual, int predicted);
  [[nodiscard]] int classes() const { return static_cast<int>(counts_.rows()); }
  [[nodiscard]] long at(int actual, int predicted) const { return counts_(actual, predicted); }
  [[nodiscard]] long row_total(int c) const { return counts_.row(c).sum(); }
  [[nodiscard]] long total() const { return counts_.sum(); }
  [[nodiscard]] const Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>& counts() const { return counts_; }

  /// One-vs-rest counts for class c (c positive).
  [[nodiscard]] BinaryCounts one_vs_rest(int c) const;
  [[nodiscard]] Metric precision(int c) const { return metrics::precision(one_vs_rest(c)); }
  [[nodiscard]] Metric recall(int c) const { return metrics::recall(one_vs_rest(c)); }
  [[nodiscard]] Metric f1(int c) const { return metrics::f1(one_vs_rest(c)); }
  [[nodiscard]] double accuracy() const;

  /// Largest off-diagonal cell as (actual, predicted).
  [[nodiscard]] std::pair<int, int> largest_confusion() const;

 private:
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

nlohmann::json to_json(const Metric& m);
nlohmann::json to_json(const BinaryCounts& c);
nlohmann::json to_json(const RegressionErrors& e);
nlohmann::json to_json(const LagStats& s);

/// {dataset, model, counts, metrics, lag_stats}
nlohmann::json detection_report(const std::string& dataset, const std::string& model,
                                const BinaryCounts& counts, const LagStats* lags);

}  // namespace scdt::metrics
