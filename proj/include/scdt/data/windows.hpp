#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "scdt/data/labels.hpp"
#include "scdt/data/normalize.hpp"
#include "scdt/nn/tensor.hpp"

namespace scdt::data {

inline constexpr int kWindowSize = 14;
inline constexpr int kFlatWindow = kWindowSize * sim::kNumFeatures;  // 182

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One replication's normalized daily features with per-day labels.
struct NormalizedSeries {
  sim::ScenarioId scenario = sim::ScenarioId::normal;
  int replication = 0;
  int first_day = 0;
  std::optional<sim::DisruptionWindow> window;
  RowMatrix values;  // days x features
  std::vector<PhaseClass> labels;
  std::vector<int> ttr;
};

/// Stacks the raw 13 features of a trace into a days x features matrix.
RowMatrix feature_matrix(const sim::ReplicationTrace& trace);

NormalizedSeries normalize_series(const sim::ReplicationTrace& trace, const LabelledTrace& labels,
                                  const NormalizationStats& stats);

struct LabelledWindow {
  RowMatrix values;  // timesteps x features
  PhaseClass label = PhaseClass::normal;
  bool anomalous = false;
  int ttr = 0;
  int replication = 0;
  int end_day = 0;

  /// Row-major by timestep: all features of step 0, then step 1, ...
  [[nodiscard]] Eigen::VectorXd flattened() const;
};

/// Sliding windows over one series; labels come from each window's last day.
/// A series shorter than `size` yields no windows (with a warning).
std::vector<LabelledWindow> make_windows(const NormalizedSeries& series, int size = kWindowSize,
                                         int stride = 1);

/// Index of sliding windows over a shared pool of series. Windows are
/// materialized only when a batch is requested.
class WindowSet {
 public:
  struct Ref {
    std::uint32_t series;
    std::uint32_t end;  // row of the last timestep
  };

  explicit WindowSet(int window_size = kWindowSize);

  void add_series(NormalizedSeries series);

  [[nodiscard]] std::size_t size() const { return refs_.size(); }
  [[nodiscard]] bool empty() const { return refs_.empty(); }
  [[nodiscard]] int window_size() const { return window_size_; }
  [[nodiscard]] Eigen::Index feature_count() const;

  [[nodiscard]] const NormalizedSeries& series_of(std::size_t i) const;
  [[nodiscard]] PhaseClass label(std::size_t i) const;
  [[nodiscard]] bool anomalous(std::size_t i) const { return label(i) != PhaseClass::normal; }
  [[nodiscard]] int ttr(std::size_t i) const;
  [[nodiscard]] int end_day(std::size_t i) const;

  /// Restricts materialized batches to these feature columns (empty = all).
  void select_features(std::vector<int> features);
  [[nodiscard]] const std::vector<int>& selected_features() const { return features_; }
  [[nodiscard]] Eigen::Index input_features() const;

  /// batch x (window_size * features), row-major by timestep.
  [[nodiscard]] nn::Matrix flat_batch(std::span<const std::size_t> ids) const;
  /// window_size matrices of batch x features.
  [[nodiscard]] nn::Sequence sequence_batch(std::span<const std::size_t> ids) const;

  /// Windows satisfying `keep`, sharing this set's series.
  [[nodiscard]] WindowSet filter(const std::function<bool(const WindowSet&, std::size_t)>& keep) const;

  /// Windows grouped by series, in index order.
  [[nodiscard]] std::vector<std::vector<std::size_t>> by_series() const;
  [[nodiscard]] std::size_t series_count() const { return pool_ ? pool_->size() : 0; }

 private:
  int window_size_;
  std::shared_ptr<std::vector<NormalizedSeries>> pool_;
  std::vector<Ref> refs_;
  std::vector<int> features_;
};

}  // namespace scdt::data
