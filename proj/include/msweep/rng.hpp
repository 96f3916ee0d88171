#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace msweep {

// Portable randomness. Every draw in the project goes through these helpers so
// that the output is fully determined by the 64-bit seed on any platform:
//
//   substream seed  = splitmix64(seed ^ splitmix64(index))
//   generator       = std::mt19937_64 seeded with the substream seed
//   bounded draw    = rejection sampling on raw 64-bit outputs (x % n once x is
//                     outside the biased low range)
//
// std::uniform_int_distribution is avoided because its algorithm is
// implementation-defined.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(substream_seed(seed, stream)); }

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: empty range");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

}  // namespace msweep
