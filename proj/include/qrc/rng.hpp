#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qrc {

using Rng = std::mt19937_64;

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream seed for a path of stream ids below `seed`, e.g.
// derive_seed(seed, {trial, timestep}). Independent of evaluation order, so
// results do not depend on how work is scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t id : path) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(seed, path));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qrc
