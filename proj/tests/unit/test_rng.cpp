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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pathint/rng.hpp"

namespace pathint {
namespace {

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto r = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto r = Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                      {0xffffffff, 0xffffffff});
  EXPECT_EQ(r, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto r = Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                      {0xa4093822, 0x299f31d0});
  EXPECT_EQ(r, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, PureFunctionOfSeedPathStep) {
  const NormalStream a(42);
  const NormalStream b(42);
  std::vector<double> x(5), y(5);
  a.fill(7, 11, x);
  b.fill(7, 11, y);
  EXPECT_EQ(x, y);
  b.fill(7, 12, y);
  EXPECT_NE(x, y);
  b.fill(8, 11, y);
  EXPECT_NE(x, y);
  NormalStream(43).fill(7, 11, y);
  EXPECT_NE(x, y);
}

TEST(NormalStream, OddLengthPrefixMatchesEvenLength) {
  const NormalStream s(3);
  std::vector<double> three(3), four(4);
  s.fill(0, 0, three);
  s.fill(0, 0, four);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(three[i], four[i]);
  }
}

TEST(NormalStream, StandardNormalMoments) {
  const NormalStream s(2024);
  const std::size_t n = 200000;
  double m1 = 0.0, m2 = 0.0, m4 = 0.0;
  std::vector<double> z(2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    s.fill(i, 0, z);
    for (double v : z) {
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  // standard errors: 1/sqrt(n), sqrt(2/n), sqrt(96/n)
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(NormalStream, PairIsUncorrelated) {
  const NormalStream s(5);
  const std::size_t n = 100000;
  double c = 0.0;
  std::vector<double> z(2);
  for (std::size_t i = 0; i < n; ++i) {
    s.fill(i, 3, z);
    c += z[0] * z[1];
  }
  EXPECT_NEAR(c / n, 0.0, 4.0 / std::sqrt(n));
}

TEST(MixSeed, DistinctSubSeeds) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::uint64_t salt = 0; salt < 50; ++salt) {
      seen.insert(mix_seed(seed, salt));
    }
  }
  EXPECT_EQ(seen.size(), 2500u);
}

}  // namespace
}  // namespace pathint
