#pragma once

#include <cmath>
#include <cstdint>

namespace krg::rng {

// Counter-based generator: every variate is a pure function of
// (seed, stream, index), so trial vectors are reproducible regardless of
// evaluation order or partitioning.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

// Uniform on (0, 1] so it is always safe under log().
inline double uniform_pos(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return (static_cast<double>(counter_key(seed, stream, index) >> 11) + 1.0) * 0x1p-53;
}

// Uniform on [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(counter_key(seed, stream, index) >> 11) * 0x1p-53;
}

// Standard normal via Box-Muller on two counter draws.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  double u1 = uniform_pos(seed, stream, 2 * index);
  double u2 = uniform01(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace krg::rng
