#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace memthermo {

// Seed for a named sub-stream of the run seed. Each consumer (drift, device
// spread, schedule scramble, read noise) draws from its own stream so that
// adding draws to one never shifts another.
std::uint64_t substream_seed(std::uint64_t run_seed, std::string_view name);

// mt19937_64 is bit-exact across standard libraries; the distributions in
// <random> are not, so the few we need are spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t run_seed, std::string_view stream) : engine_(substream_seed(run_seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                          // [0, 1)
  double normal();                           // standard normal
  std::uint64_t below(std::uint64_t bound);  // [0, bound), unbiased

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace memthermo
