#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "orbitlab/scalar.hpp"

namespace orbitlab {

/// Deterministic RNG used everywhere randomness is required.
/// Gaussian and unit-complex draws are hand-rolled (Box-Muller) so results
/// do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // n assumed far below 2^64; modulo bias negligible for test usage.
    return engine_() % n;
  }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex gaussian_complex() { return Complex(gaussian(), gaussian()); }

  Complex unit_complex() {
    const double th = 2.0 * std::numbers::pi * uniform();
    return Complex(std::cos(th), std::sin(th));
  }

  /// Sub-generator with a seed derived from (seed, stream); used to make
  /// per-trial randomness independent of evaluation order.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    // splitmix64 mixing of the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace orbitlab
