#pragma once

#include <cstdint>
#include <vector>

namespace scdt::data {

struct SplitSpec {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;

  void validate() const;
};

/// Replication indices per split, each list ascending.
struct SplitAssignment {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

/// Whole-replication random split. Validation and test sizes are floored;
/// the remainder goes to train.
SplitAssignment split_dataset(int replications, const SplitSpec& spec, std::uint64_t seed);

}  // namespace scdt::data
