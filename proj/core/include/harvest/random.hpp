#pragma once

#include <cstdint>
#include <random>

namespace harvest {

// SplitMix64 finalizer. Used to key independent streams by (seed, index).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives the seed of stream `index` under `seed`. Streams for different
/// indices are independent of each other and of generation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Engine type used throughout the library.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index) {
  return Engine(derive_seed(seed, index));
}

/// Uniform integer in [0, bound) by rejection; independent of the standard
/// library's distribution implementation.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace harvest
