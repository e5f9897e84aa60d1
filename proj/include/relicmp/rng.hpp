#pragma once

#include <cstdint>

namespace relicmp {

/// Deterministic, splittable random stream. A stream is a pure function of
/// (seed, index): replicate ell of a resampling run always sees substream
/// (seed, ell) no matter which worker executes it or in what order, which is
/// what makes results reproducible across thread counts.
///
/// Core generator: xoshiro256++ seeded through two SplitMix64 mixes of the
/// (seed, index) pair. Normal deviates use the Marsaglia polar method, so no
/// libm trig is involved.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t index);

  /// Key for a nested level of substreams (trial -> replicate, etc.).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();

  /// Uniform in [0,1) with 53 random bits.
  double next_unit();

  /// Uniform integer in [0, n), unbiased (rejection sampling). n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal deviate.
  double next_normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace relicmp
