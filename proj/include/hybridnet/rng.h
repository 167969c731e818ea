#pragma once

#include <cstdint>
#include <random>

namespace hybridnet {

// Seeded generator used for every random choice in the toolkit.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distribution helpers below are implemented here rather than
// taken from <random>, because the standard distributions are allowed to
// differ between library implementations and would break replayability.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hybridnet
