#pragma once

#include "scdt/data/windows.hpp"
#include "scdt/nn/train.hpp"

namespace scdt::data {

/// Flattened windows as both input and target.
class ReconstructionSource final : public nn::BatchSource {
 public:
  explicit ReconstructionSource(const WindowSet& set) : set_(set) {}
  [[nodiscard]] std::size_t size() const override { return set_.size(); }
  [[nodiscard]] nn::Batch batch(std::span<const std::size_t> ids) const override;

 private:
  const WindowSet& set_;
};

/// Window sequences with one-hot class targets.
class ClassSource final : public nn::BatchSource {
 public:
  explicit ClassSource(const WindowSet& set) : set_(set) {}
  [[nodiscard]] std::size_t size() const override { return set_.size(); }
  [[nodiscard]] nn::Batch batch(std::span<const std::size_t> ids) const override;

 private:
  const WindowSet& set_;
};

/// Map between days to recovery and the regression target.
struct TtrTransform {
  double scale = 1.0;  // days mapped to 1
  bool log = false;    // log1p(days) / log1p(scale) instead of days / scale

  [[nodiscard]] double forward(double days) const;
  /// Days, clamped at 0.
  [[nodiscard]] double inverse(double target) const;
};

/// Window sequences with transformed time-to-recovery targets.
class TtrSource final : public nn::BatchSource {
 public:
  TtrSource(const WindowSet& set, TtrTransform transform);
  [[nodiscard]] std::size_t size() const override { return set_.size(); }
  [[nodiscard]] nn::Batch batch(std::span<const std::size_t> ids) const override;

 private:
  const WindowSet& set_;
  TtrTransform transform_;
};

}  // namespace scdt::data
