#include "doctest.h"
#include "scdt/random.hpp"

#include <cmath>
#include <stdexcept>

using namespace scdt;

TEST_CASE("exponential sample mean matches 1/rate") {
  auto rng = substream(11, Stream::stage1);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int k = 0; k < n; ++k) sum += *sample_event_time(18.0, rng);
  const double mean = sum / n;
  CHECK(mean > (1.0 / 18.0) * 0.995);
  CHECK(mean < (1.0 / 18.0) * 1.005);
}

TEST_CASE("zero rate never fires, negative rate throws") {
  auto rng = substream(1, Stream::stage2);
  CHECK_FALSE(sample_event_time(0.0, rng).has_value());
  CHECK_THROWS_AS(sample_event_time(-1.0, rng), std::invalid_argument);
}

TEST_CASE("same seed gives the same draws") {
  auto a = substream(replication_seed(5, 2, 3), Stream::arrivals);
  auto b = substream(replication_seed(5, 2, 3), Stream::arrivals);
  for (int k = 0; k < 100; ++k) CHECK(*sample_event_time(15.0, a) == *sample_event_time(15.0, b));
}

TEST_CASE("substreams differ by purpose and replication") {
  auto a = substream(replication_seed(5, 1, 0), Stream::arrivals);
  auto b = substream(replication_seed(5, 1, 0), Stream::stage1);
  auto c = substream(replication_seed(5, 1, 1), Stream::arrivals);
  const auto x = a();
  CHECK(x != b());
  CHECK(x != c());
}

TEST_CASE("uniform_int covers the inclusive range") {
  auto rng = substream(3, Stream::window);
  int lo = 1000, hi = -1;
  for (int k = 0; k < 5000; ++k) {
    const auto v = uniform_int(rng, 30, 60);
    lo = std::min<int>(lo, static_cast<int>(v));
    hi = std::max<int>(hi, static_cast<int>(v));
  }
  CHECK(lo == 30);
  CHECK(hi == 60);
}
