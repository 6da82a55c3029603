#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aggsamp {

// Deterministic randomness helpers.
//
// All experiment randomness flows through mt19937_64 (whose output sequence is
// fixed by the C++ standard) plus the hand-rolled transforms below.  The
// std::*_distribution adapters are deliberately avoided: their algorithms are
// implementation-defined, which would break cross-toolchain reproducibility.

// splitmix64; used to derive independent sub-seeds from (seed, tag) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) ^ mix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a,
                                 std::uint64_t tag_b) {
  return mix64(derive_seed(seed, tag_a) ^ mix64(tag_b + 0x517cc1b727220a95ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return -std::log(u) / rate;
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Stateless uniform [0,1) draw keyed by (seed, index); value i.i.d. across
// distinct keys.  Used where a fixed per-device draw must not depend on
// evaluation order.
inline double keyed_uniform01(std::uint64_t seed, std::uint64_t key) {
  return static_cast<double>(derive_seed(seed, key) >> 11) * 0x1.0p-53;
}

}  // namespace aggsamp
