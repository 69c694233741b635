#pragma once

#include <cstdint>

#include "latdisp/lattice.hpp"

namespace latdisp {

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, increment
/// 0x9E3779B97F4A7C15, output mix with multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB and shifts 30/27/31. Doubles take the top 53 bits.
/// Only integer arithmetic is involved, so any language can reproduce
/// the stream bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Field with independent uniform [-1,1) real and imaginary parts, mean removed.
ComplexField random_mean_zero_field(const LatticeGrid& grid, SplitMix64& rng);

/// Mean-zero field whose spectrum is supported on |k|_inf <= max_mode, with
/// uniform random coefficients.
ComplexField random_band_limited_field(const LatticeGrid& grid, int max_mode, SplitMix64& rng);

}  // namespace latdisp
