#pragma once
// Deterministic random primitives. std::normal_distribution and friends are
// implementation-defined, so every sampler that feeds published numbers is
// spelled out explicitly here (Box-Muller normals, rejection-sampled bounded
// integers, Bernoulli-loop binomials) on top of a splitmix64 state that is
// a plain uint64 — trivially seedable, splittable, and copyable.

#include <cmath>
#include <cstdint>

#include "spinmet/types.hpp"

namespace spinmet {

// splitmix64 step; the state is the generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for logical stream `stream` of a campaign keyed by `master`; streams
// are decorrelated so per-item work can be reordered or parallelized without
// changing any draw.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  const std::uint64_t a = splitmix64(s);
  s = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  const std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x632be59bd9b4e019ULL + (stream << 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform01_open0(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform(std::uint64_t& state, double lo, double hi) {
  return lo + (hi - lo) * uniform01(state);
}

// Unbiased integer in [0, n); rejection on the modulo bias region.
inline std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = splitmix64(state);
  while (x >= limit) x = splitmix64(state);
  return x % n;
}

// Standard normal via Box-Muller (cosine branch only, for statelessness).
inline double standard_normal(std::uint64_t& state) {
  const double u1 = uniform01_open0(state);
  const double u2 = uniform01(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Binomial count by explicit Bernoulli trials; exact and bit-stable.
inline long long binomial(std::uint64_t& state, long long n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  long long k = 0;
  for (long long i = 0; i < n; ++i) {
    if (uniform01(state) < p) ++k;
  }
  return k;
}

}  // namespace spinmet
