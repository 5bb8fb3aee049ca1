#include "scdt/random.hpp"

#include <cmath>
#include <stdexcept>

namespace scdt {

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint32_t scenario,
                               std::uint32_t replication) {
  // splitmix64 finalizer
  std::uint64_t z = (static_cast<std::uint64_t>(scenario) << 32 | replication) +
                    0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return base_seed ^ (z ^ (z >> 31));
}

Rng substream(std::uint64_t seed, Stream purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

double uniform_open(Rng& rng) {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(rng() >> 11) + 0.5) * kScale;
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng() % span);
}

std::optional<double> sample_event_time(double rate, Rng& rng) {
  if (!(rate >= 0.0)) throw std::invalid_argument("sample_event_time: negative rate");
  if (rate == 0.0) return std::nullopt;
  return -std::log(uniform_open(rng)) / rate;
}

}  // namespace scdt
