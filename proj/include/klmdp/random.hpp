#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace klmdp {

/// The random stream type used everywhere. Streams are always passed explicitly.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the seed of child stream `index` from `base`. Distinct (base, index)
/// pairs give statistically independent streams; the map is pure.
constexpr std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Uniform draw on [0, 1) with 53 random bits. Defined bit-for-bit, unlike
/// std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fills `out` with a Dirichlet(alpha, ..., alpha) draw.
inline void sample_dirichlet(double alpha, std::span<double> out, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  double total = 0.0;
  for (double& w : out) {
    w = gamma(rng);
    total += w;
  }
  if (total <= 0.0) {
    // every gamma draw underflowed (tiny alpha); fall back to a uniform vertex
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    for (double& w : out) w = 0.0;
    out[pick(rng)] = 1.0;
    return;
  }
  for (double& w : out) w /= total;
}

}  // namespace klmdp
