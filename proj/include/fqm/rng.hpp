#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fqm {

namespace detail {

// splitmix64 finalizer; used for seed derivation only, never as the stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic random source. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard); every distribution on top of it is
// implemented here so that results are reproducible bit for bit across
// platforms and standard libraries.
//
// child(k) derives an independent substream from (seed, k) alone, not from
// the current engine state, so per-trial streams do not depend on scheduling
// or thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(detail::mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng child(std::uint64_t stream) const {
    return Rng(detail::mix64(seed_ ^ detail::mix64(stream ^ 0x5851f42d4c957f2dULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  bool next_bit() { return next_u64() & 1u; }

  // Uniform in [0, bound). bound = 0 is invalid.
  std::uint64_t uniform_u64(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  std::size_t uniform_index(std::size_t bound) {
    return static_cast<std::size_t>(uniform_u64(bound));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform_double() < p;
  }

  // True with probability exactly 2^-k: k fresh bits, all zero.
  bool bernoulli_pow2(unsigned k) {
    while (k >= 64) {
      if (next_u64() != 0) return false;
      k -= 64;
    }
    if (k == 0) return true;
    return (next_u64() >> (64 - k)) == 0;
  }

  // Standard normal via Box-Muller; draws two uniforms per call.
  double normal() {
    double u;
    do {
      u = uniform_double();
    } while (u == 0.0);
    const double v = uniform_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fqm
