#pragma once

#include <cstdint>

namespace spin7 {

/// Counter-based generator (splitmix64 of seed ^ counter).  Stateless per
/// draw, so sampling harnesses can split work across threads by handing
/// each worker a disjoint counter range.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t x = seed_ + 0x9e3779b97f4a7c15ull * ++counter_;
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    /// Uniform double in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace spin7
