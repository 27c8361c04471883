#pragma once

#include <cmath>
#include <cstdint>

namespace ibptc {

// Counter-based randomness: every draw is a pure function of
// (seed, trial, lane, index), so parallel trials never share streams and
// results do not depend on call batching.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t trial,
                                  std::uint64_t lane, std::uint64_t index) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ lane);
  h = mix64(h ^ index);
  return h;
}

// Uniform in the open interval (0, 1); never returns 0, safe under log().
inline double uniform01(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

// Standard normal via Box-Muller on two hashed counters. Draw k consumes
// counter indices 2k and 2k+1 of its (seed, trial, lane) stream.
inline double gaussian_sample(std::uint64_t seed, std::uint64_t trial,
                              std::uint64_t lane, std::uint64_t index) {
  const double u1 = uniform01(counter_hash(seed, trial, lane, 2 * index));
  const double u2 = uniform01(counter_hash(seed, trial, lane, 2 * index + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline std::uint8_t bit_sample(std::uint64_t seed, std::uint64_t trial,
                               std::uint64_t lane, std::uint64_t index) {
  return static_cast<std::uint8_t>(counter_hash(seed, trial, lane, index) & 1u);
}

// Unbiased-enough bounded draw for construction-time randomness (interleaver
// search). Uses multiply-shift so results are identical on every platform.
template <typename Gen>
std::uint32_t rng_below(Gen& gen, std::uint32_t n) {
  const std::uint64_t x = static_cast<std::uint64_t>(gen()) & 0xffffffffULL;
  return static_cast<std::uint32_t>((x * n) >> 32);
}

}  // namespace ibptc
