#include "scdt/data/windows.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "scdt/log.hpp"

namespace scdt::data {

RowMatrix feature_matrix(const sim::ReplicationTrace& trace) {
  RowMatrix m(static_cast<Eigen::Index>(trace.records.size()), sim::kNumFeatures);
  for (std::size_t t = 0; t < trace.records.size(); ++t)
    for (int j = 0; j < sim::kNumFeatures; ++j)
      m(static_cast<Eigen::Index>(t), j) = trace.records[t].features[static_cast<std::size_t>(j)];
  return m;
}

NormalizedSeries normalize_series(const sim::ReplicationTrace& trace, const LabelledTrace& labels,
                                  const NormalizationStats& stats) {
  if (labels.records.size() != trace.records.size())
    throw std::invalid_argument("normalize_series: labels do not match trace");
  NormalizedSeries s;
  s.scenario = trace.scenario.id;
  s.replication = trace.replication;
  s.first_day = trace.records.empty() ? 0 : trace.records.front().day;
  s.window = trace.scenario.window;
  s.values = apply_minmax(stats, feature_matrix(trace));
  s.labels.reserve(labels.records.size());
  s.ttr.reserve(labels.records.size());
  for (const auto& r : labels.records) {
    s.labels.push_back(r.label);
    s.ttr.push_back(r.ttr);
  }
  return s;
}

Eigen::VectorXd LabelledWindow::flattened() const {
  Eigen::VectorXd out(values.size());
  Eigen::Map<RowMatrix>(out.data(), values.rows(), values.cols()) = values;
  return out;
}

std::vector<LabelledWindow> make_windows(const NormalizedSeries& series, int size, int stride) {
  if (size < 1 || stride < 1) throw std::invalid_argument("make_windows: size and stride must be >= 1");
  std::vector<LabelledWindow> out;
  const auto length = series.values.rows();
  if (length < size) {
    log_warning("make_windows: series of length " + std::to_string(length) +
                " is shorter than the window");
    return out;
  }
  for (Eigen::Index end = size - 1; end < length; end += stride) {
    LabelledWindow w;
    w.values = series.values.middleRows(end - size + 1, size);
    const auto e = static_cast<std::size_t>(end);
    w.label = series.labels[e];
    w.anomalous = w.label != PhaseClass::normal;
    w.ttr = series.ttr[e];
    w.replication = series.replication;
    w.end_day = series.first_day + static_cast<int>(end);
    out.push_back(std::move(w));
  }
  return out;
}

WindowSet::WindowSet(int window_size)
    : window_size_(window_size), pool_(std::make_shared<std::vector<NormalizedSeries>>()) {
  if (window_size < 1) throw std::invalid_argument("WindowSet: window size must be >= 1");
}

void WindowSet::add_series(NormalizedSeries series) {
  if (series.values.rows() != static_cast<Eigen::Index>(series.labels.size()))
    throw std::invalid_argument("WindowSet: labels do not match series length");
  if (!pool_->empty() && series.values.cols() != pool_->front().values.cols())
    throw std::invalid_argument("WindowSet: feature count mismatch");
  if (pool_.use_count() > 1) pool_ = std::make_shared<std::vector<NormalizedSeries>>(*pool_);
  const auto id = static_cast<std::uint32_t>(pool_->size());
  const auto rows = series.values.rows();
  pool_->push_back(std::move(series));
  if (rows < window_size_) {
    log_warning("WindowSet: series shorter than the window skipped");
    return;
  }
  for (Eigen::Index end = window_size_ - 1; end < rows; ++end)
    refs_.push_back(Ref{id, static_cast<std::uint32_t>(end)});
}

Eigen::Index WindowSet::feature_count() const {
  return pool_->empty() ? 0 : pool_->front().values.cols();
}

Eigen::Index WindowSet::input_features() const {
  return features_.empty() ? feature_count() : static_cast<Eigen::Index>(features_.size());
}

const NormalizedSeries& WindowSet::series_of(std::size_t i) const {
  return (*pool_)[refs_.at(i).series];
}

PhaseClass WindowSet::label(std::size_t i) const { return series_of(i).labels[refs_[i].end]; }
int WindowSet::ttr(std::size_t i) const { return series_of(i).ttr[refs_[i].end]; }
int WindowSet::end_day(std::size_t i) const {
  return series_of(i).first_day + static_cast<int>(refs_[i].end);
}

void WindowSet::select_features(std::vector<int> features) {
  for (int f : features)
    if (f < 0 || f >= feature_count()) throw std::out_of_range("select_features: bad feature index");
  features_ = std::move(features);
}

nn::Matrix WindowSet::flat_batch(std::span<const std::size_t> ids) const {
  const Eigen::Index f = input_features();
  nn::Matrix out(static_cast<Eigen::Index>(ids.size()), window_size_ * f);
  for (std::size_t b = 0; b < ids.size(); ++b) {
    const auto& ref = refs_.at(ids[b]);
    const auto& values = (*pool_)[ref.series].values;
    const Eigen::Index first = static_cast<Eigen::Index>(ref.end) - window_size_ + 1;
    const auto row = static_cast<Eigen::Index>(b);
    for (int t = 0; t < window_size_; ++t) {
      if (features_.empty()) {
        out.row(row).segment(t * f, f) = values.row(first + t);
      } else {
        for (Eigen::Index k = 0; k < f; ++k)
          out(row, t * f + k) = values(first + t, features_[static_cast<std::size_t>(k)]);
      }
    }
  }
  return out;
}

nn::Sequence WindowSet::sequence_batch(std::span<const std::size_t> ids) const {
  const Eigen::Index f = input_features();
  nn::Sequence out(static_cast<std::size_t>(window_size_),
                   nn::Matrix(static_cast<Eigen::Index>(ids.size()), f));
  for (std::size_t b = 0; b < ids.size(); ++b) {
    const auto& ref = refs_.at(ids[b]);
    const auto& values = (*pool_)[ref.series].values;
    const Eigen::Index first = static_cast<Eigen::Index>(ref.end) - window_size_ + 1;
    const auto row = static_cast<Eigen::Index>(b);
    for (int t = 0; t < window_size_; ++t) {
      auto& step = out[static_cast<std::size_t>(t)];
      if (features_.empty()) {
        step.row(row) = values.row(first + t);
      } else {
        for (Eigen::Index k = 0; k < f; ++k)
          step(row, k) = values(first + t, features_[static_cast<std::size_t>(k)]);
      }
    }
  }
  return out;
}

WindowSet WindowSet::filter(const std::function<bool(const WindowSet&, std::size_t)>& keep) const {
  WindowSet out(window_size_);
  out.pool_ = pool_;
  out.features_ = features_;
  for (std::size_t i = 0; i < refs_.size(); ++i)
    if (keep(*this, i)) out.refs_.push_back(refs_[i]);
  return out;
}

std::vector<std::vector<std::size_t>> WindowSet::by_series() const {
  std::vector<std::vector<std::size_t>> out(pool_->size());
  for (std::size_t i = 0; i < refs_.size(); ++i) out[refs_[i].series].push_back(i);
  return out;
}

}  // namespace scdt::data
