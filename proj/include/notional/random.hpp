#pragma once

#include <cstdint>
#include <random>

namespace notional {

/// Deterministic stream over std::mt19937_64. Only the raw engine output is
/// used so draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream index), e.g. one per tree.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(mix(seed) + stream));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform01_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace notional
