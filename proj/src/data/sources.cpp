#include "scdt/data/sources.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scdt::data {

nn::Batch ReconstructionSource::batch(std::span<const std::size_t> ids) const {
  nn::Batch b;
  b.target = set_.flat_batch(ids);
  b.input = nn::as_sequence(b.target);
  return b;
}

nn::Batch ClassSource::batch(std::span<const std::size_t> ids) const {
  nn::Batch b;
  b.input = set_.sequence_batch(ids);
  b.target = nn::Matrix::Zero(static_cast<Eigen::Index>(ids.size()), kNumClasses);
  for (std::size_t r = 0; r < ids.size(); ++r)
    b.target(static_cast<Eigen::Index>(r), static_cast<int>(set_.label(ids[r]))) = 1.0;
  return b;
}

double TtrTransform::forward(double days) const {
  return log ? std::log1p(days) / std::log1p(scale) : days / scale;
}

double TtrTransform::inverse(double target) const {
  return std::max(0.0, log ? std::expm1(target * std::log1p(scale)) : target * scale);
}

TtrSource::TtrSource(const WindowSet& set, TtrTransform transform) : set_(set), transform_(transform) {
  if (!(transform.scale > 0.0)) throw std::invalid_argument("TtrSource: scale must be > 0");
}

nn::Batch TtrSource::batch(std::span<const std::size_t> ids) const {
  nn::Batch b;
  b.input = set_.sequence_batch(ids);
  b.target.resize(static_cast<Eigen::Index>(ids.size()), 1);
  for (std::size_t r = 0; r < ids.size(); ++r)
    b.target(static_cast<Eigen::Index>(r), 0) = transform_.forward(set_.ttr(ids[r]));
  return b;
}

}  // namespace scdt::data
