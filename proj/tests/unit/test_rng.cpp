#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "memthermo/rng.hpp"

using namespace memthermo;

TEST_CASE("engine is the standard mt19937_64") {
  std::mt19937_64 g;  // default seed 5489
  g.discard(9999);
  CHECK(g() == 9981545732273789042ULL);
}

TEST_CASE("named sub-streams") {
  // Frozen from tests/oracles/oracles.py.
  CHECK(substream_seed(1, "schedule") == 5237879125511146441ULL);
  CHECK(substream_seed(1, "drift") == 9809605730072183586ULL);
  CHECK(substream_seed(1, "device_spread") == 4800346439600265126ULL);
  CHECK(substream_seed(1, "read_noise") == 14845842950236318536ULL);
  CHECK(substream_seed(2, "drift") != substream_seed(1, "drift"));
}

TEST_CASE("streams are independent of each other's consumption") {
  Rng a(7, "drift");
  Rng b(7, "drift");
  Rng other(7, "schedule");
  for (int i = 0; i < 1000; ++i) (void)other.normal();
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform, normal, below") {
  Rng r(42);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    ++counts[r.below(7)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(r.below(1) == 0);
  CHECK(r.below(0) == 0);
}
