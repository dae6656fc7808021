// Copyright 2026 The pathint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHINT_RNG_HPP
#define PATHINT_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

/**
 * \file
 * \brief Counter-based random numbers for reproducible parallel path simulation.
 *
 * Every Gaussian increment is a pure function of (master seed, path index, step index),
 * so an ensemble does not depend on how paths are distributed over worker threads.
 */

namespace pathint {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Standard normal variates keyed by (seed, path, step).
class NormalStream {
 public:
  explicit constexpr NormalStream(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Fills `out` with independent N(0,1) draws for the given path and step.
  void fill(std::uint64_t path, std::uint64_t step, std::span<double> out) const noexcept {
    const auto step_lo = static_cast<std::uint32_t>(step);
    const auto path_lo = static_cast<std::uint32_t>(path);
    const auto path_hi = static_cast<std::uint32_t>(path >> 32);
    // The high word of the step index is folded into the block counter; grids never
    // reach 2^32 steps in practice, but the mapping stays injective below 2^16 blocks.
    const auto step_hi = static_cast<std::uint32_t>(step >> 32) << 16;
    for (std::size_t j = 0; 2 * j < out.size(); ++j) {
      const auto r = Philox4x32::generate(
          {static_cast<std::uint32_t>(j) | step_hi, step_lo, path_lo, path_hi}, key_);
      const auto [z0, z1] = box_muller(r);
      out[2 * j] = z0;
      if (2 * j + 1 < out.size()) {
        out[2 * j + 1] = z1;
      }
    }
  }

 private:
  static std::array<double, 2> box_muller(const Philox4x32::Counter& r) noexcept {
    constexpr double kTwoPow53 = 1.0 / 9007199254740992.0;
    const std::uint64_t a = (std::uint64_t{r[0]} << 32) | r[1];
    const std::uint64_t b = (std::uint64_t{r[2]} << 32) | r[3];
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * kTwoPow53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * kTwoPow53;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  Philox4x32::Key key_;
};

}  // namespace pathint

#endif  // PATHINT_RNG_HPP
