// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace qdistill {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Deterministic sub-seed for an independent stage of a run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^
               mix64(tag + 0xd1b54a32d192ed03ull));
}

}  // namespace detail

using detail::derive_seed;

/// Small splitmix64 generator with explicit stream derivation.
///
/// Every consumer keys its own stream from (seed, stream ids), so trial
/// order and setting order never influence the numbers another consumer
/// sees. No ambient entropy anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_a = 0,
               std::uint64_t stream_b = 0, std::uint64_t stream_c = 0) {
    std::uint64_t s = detail::mix64(seed + 0x9e3779b97f4a7c15ull);
    s = detail::mix64(s ^ detail::mix64(stream_a + 0xd1b54a32d192ed03ull));
    s = detail::mix64(s ^ detail::mix64(stream_b + 0x8cb92ba72f3d8dd7ull));
    s = detail::mix64(s ^ detail::mix64(stream_c + 0x2545f4914f6cdd1dull));
    state_ = s;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call, deterministic).
  double next_normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Poisson draw. Knuth's product method for small means, Hormann's PTRS
  /// transformed rejection for large ones; both exact and both consume the
  /// stream deterministically.
  std::int64_t next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      std::int64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= next_double();
      } while (p > limit);
      return k - 1;
    }
    // PTRS (W. Hormann, "The transformed rejection method for generating
    // Poisson random variables").
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = next_double() - 0.5;
      const double v = next_double();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
      if (lhs <= rhs) return static_cast<std::int64_t>(k);
    }
  }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace qdistill
