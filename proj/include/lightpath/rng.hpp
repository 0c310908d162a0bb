#pragma once

#include <cstdint>

namespace lightpath {

// Counter-based SplitMix64 stream. The i-th output depends only on (seed, i),
// so independent streams replay identically regardless of thread scheduling
// and platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : key_(Mix(seed)), counter_(0) {}

  std::uint64_t Next() { return Mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t Below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace lightpath
