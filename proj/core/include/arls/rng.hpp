#pragma once

#include <cstdint>

namespace arls {

/// Deterministic 64-bit mixer (splitmix64). Used wherever the exact draw
/// sequence must be pinned independent of the standard library: seed
/// derivation for experiment cells and the E-step subsample.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from one splitmix64 step.
inline double uniform_unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

/// Derives a child seed from a master seed and up to three indices, so every
/// experiment cell gets an independent, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ull * (a + 1);
  splitmix64(s);
  s ^= 0xbf58476d1ce4e5b9ull * (b + 1);
  splitmix64(s);
  s ^= 0x94d049bb133111ebull * (c + 1);
  return splitmix64(s);
}

}  // namespace arls
