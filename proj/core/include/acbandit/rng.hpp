#pragma once

#include <cmath>
#include <cstdint>

namespace acb {

// All randomness in the library flows through this generator so that runs
// are reproducible bit-for-bit across reruns and worker counts.  Streams
// are derived from a 64-bit master seed with a splitmix-style mixer; each
// replicate (and each bootstrap replicate within it) owns an independent
// stream keyed by its index, never by execution order.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a child seed from (seed, stream index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ with Box-Muller normals (no cached spare, so the draw
/// layout is one value per call).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x = mix64(x);
      w = x;
    }
  }

  static Rng replicate_stream(std::uint64_t master, std::uint64_t replicate) {
    return Rng(derive_seed(master, replicate));
  }
  static Rng bootstrap_stream(std::uint64_t master, std::uint64_t replicate, std::uint64_t b) {
    return Rng(derive_seed(derive_seed(master, replicate), 0x100000000ULL + b));
  }
  /// Auxiliary stream (oracle Monte Carlo, myopic sweeps, ...) keyed by tag.
  static Rng tagged_stream(std::uint64_t master, std::uint64_t tag) {
    return Rng(derive_seed(master, 0x200000000ULL + tag));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double gauss() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace acb
