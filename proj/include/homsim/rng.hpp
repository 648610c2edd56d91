#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include <homsim/constants.hpp>

namespace homsim {

/// splitmix64 scrambler; the reference 64-bit finalizer.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-point seed for scans: the base seed advanced by (index + 1) golden
/// steps and scrambled. Stable across builds and platforms, so a scan's
/// per-point streams are reproducible from (base_seed, point_index) alone.
inline std::uint64_t derived_seed(std::uint64_t base_seed, std::uint64_t point_index) {
  return splitmix64(base_seed + (point_index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic random stream: mt19937_64 (bit-specified by the standard)
/// with explicit uniform and Gaussian converters, avoiding the
/// implementation-defined std::*_distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the basic Box-Muller transform; consumes exactly
  /// two uniforms per call.
  double gauss() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace homsim
