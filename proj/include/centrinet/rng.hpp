#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace centrinet {

// Seeding scheme
// --------------
// Every random draw in a run comes from std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Sub-streams are derived from a
// parent seed and a text label ("flows", "anomaly", "positions" ...) plus an
// integer index, by hashing the label with FNV-1a and mixing with the
// SplitMix64 finalizer. A new consumer therefore never shifts the draws of
// an existing one.
//
// Distributions are implemented here rather than taken from <random>, because
// std::uniform_*_distribution output is implementation-defined.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed for the sub-stream `label`/`index` of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(parent ^ fnv1a64(label)) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Rejection sampling against the largest multiple of bound.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace centrinet
