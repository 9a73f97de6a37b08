#pragma once

#include <cstdint>

namespace geqhom {

/// SplitMix64 finalizer. Used as the mixing function of a counter-based
/// generator: every draw is a pure function of (seed, stream, counter), so
/// ensembles do not depend on evaluation order or worker count.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 1))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Child generator for an independent sub-stream.
  constexpr CounterRng split(std::uint64_t child) const { return CounterRng(key_, child); }

 private:
  std::uint64_t key_;
};

}  // namespace geqhom
