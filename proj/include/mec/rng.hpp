#pragma once

// Portable random streams.
//
// Every stream is a std::mt19937_64 (bit-exact across standard libraries)
// seeded from a SplitMix64 hash of (seed, tag, a, b). Distributions are
// implemented here rather than taken from <random>, whose distribution
// algorithms are implementation-defined, so seeds reproduce across builds.

#include <cstdint>
#include <random>

namespace mec::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Tag : std::uint64_t {
  user = 1,
  server = 2,
  fading = 3,
  random_offload = 4,
};

inline std::mt19937_64 stream(std::uint64_t seed, Tag tag, std::uint64_t a = 0,
                              std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return std::mt19937_64(h);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

/// Exponential with unit mean (squared magnitude of a unit-power Rayleigh fade).
double exponential1(std::mt19937_64& g);

}  // namespace mec::rng
