#pragma once

#include <cstdint>
#include <random>

namespace pulsebft {

/// Deterministic random source. Wraps mt19937_64 but never uses the standard
/// distributions, whose output is implementation-defined; every draw here is
/// fully specified so traces replay bit-for-bit on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform in [0, bound), bound >= 1. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      std::uint64_t x = gen_();
      if (x < limit) return x % bound;
    }
  }

  /// Uniform in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin() { return (gen_() & 1u) != 0; }

  /// Independent child stream; used to give each simulation run its own
  /// generator without correlating neighbouring seeds.
  Rng fork(std::uint64_t stream) { return Rng(mix(gen_() ^ mix(stream))); }

  /// splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace pulsebft
