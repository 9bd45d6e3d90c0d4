#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace quite {

// Purpose tags for deriving independent substreams from one root seed.
// Adding a purpose never perturbs existing streams.
enum class Stream : std::uint64_t {
  Qualities = 1,
  Reliabilities = 2,
  Graph = 3,
  Assignment = 4,
  Answers = 5,
  QualityInit = 6,
  PriorSample = 7,
  Trial = 8,
  Calibration = 9,
  Stage2Answers = 10,
  SingleStage = 11,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic substream: the same (root, purpose, index) always yields the
// same generator, independent of call order elsewhere.
inline std::mt19937_64 substream(std::uint64_t root, Stream purpose,
                                 std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(root);
  s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  s = splitmix64(s ^ index);
  return std::mt19937_64(s);
}

// Bit-stable helpers (avoid implementation-defined std distributions).
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = g();
    if (r >= threshold) return r % n;
  }
}

inline bool bernoulli(std::mt19937_64& g, double p) {
  return uniform01(g) < p;
}

// Box-Muller; returns one draw, caches nothing (two uniforms per call).
inline double normal(std::mt19937_64& g, double mu = 0.0, double sigma = 1.0) {
  double u1 = uniform01(g);
  double u2 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace quite
