// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace ipg {

/// Seedable 64-bit generator with a documented stream (splitmix64), so
/// generated instances are reproducible bit-for-bit across platforms.
/// std:: distributions are deliberately avoided: their output is
/// implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [lo, hi], inclusive. Rejection sampling on the
  /// top of the stream; deterministic for a fixed seed.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) // full 64-bit range
      return static_cast<std::int64_t>(next());
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

} // namespace ipg
