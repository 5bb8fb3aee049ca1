#include "scdt/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scdt/random.hpp"

namespace scdt::data {

void SplitSpec::validate() const {
  if (train < 0.0 || validation < 0.0 || test < 0.0)
    throw std::invalid_argument("SplitSpec: negative ratio");
  if (std::abs(train + validation + test - 1.0) > 1e-9)
    throw std::invalid_argument("SplitSpec: ratios must sum to 1");
}

SplitAssignment split_dataset(int replications, const SplitSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (replications < 5) throw std::invalid_argument("split_dataset: need at least 5 replications");
  std::vector<int> order(static_cast<std::size_t>(replications));
  std::iota(order.begin(), order.end(), 0);
  auto rng = substream(seed, Stream::split);
  std::shuffle(order.begin(), order.end(), rng);

  // The epsilon keeps 0.2 * 300 from flooring to 59.
  const auto n_val = static_cast<std::size_t>(std::floor(spec.validation * replications + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(spec.test * replications + 1e-9));
  const auto n_train = order.size() - n_val - n_test;

  SplitAssignment out;
  out.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  out.validation.assign(order.begin() + static_cast<long>(n_train),
                        order.begin() + static_cast<long>(n_train + n_val));
  out.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
  for (auto* v : {&out.train, &out.validation, &out.test}) std::sort(v->begin(), v->end());
  return out;
}

}  // namespace scdt::data
