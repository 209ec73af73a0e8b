#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "augsel/common.hpp"

// All randomness in the library flows through these helpers. The engine is
// std::mt19937_64, whose output sequence is pinned by the C++ standard, and
// the draw functions below avoid std::uniform_*_distribution (whose mapping
// is implementation-defined), so identical seeds give identical results on
// every platform.

namespace augsel::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable seed derivation: base seed plus a list of stream-identifying words
// (policy index, repeat index, purpose tag, ...).
inline std::uint64_t derive(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix(base);
  for (std::uint64_t w : words) h = mix(h ^ w);
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) by rejection.
inline std::size_t below(Engine& eng, std::size_t n) {
  require(n > 0, ErrorKind::invalid_argument, "rng::below: n must be positive");
  const std::uint64_t span = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % span);
}

// Fisher-Yates; stable across platforms (std::shuffle is not).
template <typename T>
void shuffle(Engine& eng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = below(eng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct indices from [0, n), uniform without replacement.
inline std::vector<std::size_t> sample_indices(Engine& eng, std::size_t n, std::size_t k) {
  require(k <= n, ErrorKind::size, "sample_indices: k exceeds n");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + below(eng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

// Standard normal via Box-Muller on the portable uniform.
inline double normal(Engine& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 <= 0.0);
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace augsel::rng
