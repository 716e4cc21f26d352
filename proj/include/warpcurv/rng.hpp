#pragma once

#include <cstdint>

namespace warpcurv {

/// Deterministic 64-bit generator; identical sequences on every platform.
struct SplitMix64 {
  std::uint64_t s;

  explicit SplitMix64(std::uint64_t seed) : s(seed) {}

  std::uint64_t next() {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Independent stream for sample `index` of an experiment seeded by `seed`;
/// workers may draw from streams in any order without affecting results.
inline SplitMix64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  g.next();
  g.next();
  return g;
}

}  // namespace warpcurv
