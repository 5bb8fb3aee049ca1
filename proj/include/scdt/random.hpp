#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace scdt {

/// The project-wide generator. Every stochastic component draws from one of
/// these, seeded through `substream` so reruns are bit-exact.
using Rng = std::mt19937_64;

/// Purpose tags for independent substreams of one replication.
enum class Stream : std::uint32_t {
  arrivals = 1,
  stage1 = 2,
  stage2 = 3,
  stage3 = 4,
  window = 5,
  split = 6,
  init = 7,
  shuffle = 8,
  dropout = 9,
};

/// Seed of one replication: base seed xor a 64-bit mix of (scenario, replication).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint32_t scenario,
                               std::uint32_t replication);

/// Independent generator for one purpose under a given seed.
Rng substream(std::uint64_t seed, Stream purpose);

/// Uniform double in the open interval (0, 1) built from the top 53 bits.
double uniform_open(Rng& rng);

/// Uniform integer in [lo, hi], both inclusive.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// Exponential holding time with mean 1/rate. A zero rate never fires and
/// yields nullopt; a negative rate throws std::invalid_argument.
std::optional<double> sample_event_time(double rate, Rng& rng);

}  // namespace scdt
