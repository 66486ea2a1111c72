#pragma once

// Portable random helpers. The standard distributions are implementation
// defined, so everything that feeds a checkpoint goes through these instead.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace qkge {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a list of indices.
template <typename... Ts>
std::uint64_t derive_seed(std::uint64_t base, Ts... indices) noexcept {
  std::uint64_t s = splitmix64(base);
  ((s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(indices) + 0x632BE59BD9B4E019ULL))), ...);
  return s;
}

using Engine = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  const std::uint64_t limit = Engine::max() - (Engine::max() % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::span<T> items, Engine& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace qkge
