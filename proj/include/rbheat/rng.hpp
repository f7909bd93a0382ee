#pragma once

#include <cstdint>

namespace rbheat {

/// Counter-based RNG built on the splitmix64 finalizer. Every draw is a pure
/// function of its key tuple, so sampling is reproducible and independent of
/// evaluation order or thread scheduling.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

/// Uniform double in [0, 1) from 53 high bits.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seed stream for realization r of an ensemble keyed by a global seed.
inline std::uint64_t realization_seed(std::uint64_t seed, int realization) {
  return keyed_bits(seed, 0x7265616cull, static_cast<std::uint64_t>(realization));
}

}  // namespace rbheat
