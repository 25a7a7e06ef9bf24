#pragma once

#include <cstdint>
#include <initializer_list>

namespace lookahead {

// Counter-based deterministic random numbers.
//
// Every random draw in the library is produced by hashing a small tuple of
// integers (run seed, episode index, step index, ...) through a splitmix64
// finalizer.  There is no hidden global state: the same key tuple always
// yields the same stream on every platform, and disjoint tuples yield
// independent streams, so episodes/seeds can be generated in parallel or out
// of order without changing any result.

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Fold a tuple of integers into a single 64-bit stream key.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t p : parts) k = mix64(k ^ (p + 0x9e3779b97f4a7c15ULL));
  return k;
}

struct CounterRng {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  explicit CounterRng(std::uint64_t key_ = 0) : key(key_) {}
  CounterRng(std::initializer_list<std::uint64_t> parts) : key(derive_key(parts)) {}

  std::uint64_t next_u64() {
    counter += 0x9e3779b97f4a7c15ULL;
    return mix64(key + counter);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Index into a cumulative-weight partition of [0, 1).  `weights` need not be
  // normalized perfectly; the last bucket absorbs any rounding slack.
  template <class Seq>
  int next_index(const Seq& weights) {
    const double u = next_double();
    double acc = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int i = 0; i < n; ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return n - 1;
  }
};

}  // namespace lookahead
