// Copyright 2026 The ratio-mc Authors.
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

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <thread>
#include <vector>

namespace {

using ratio_mc::create_rng;

TEST(Philox, KnownAnswerVectors) {
  using ratio_mc::detail::philox4x32_10;
  using Block = ratio_mc::detail::PhiloxBlock;
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameSeedAndStreamRepeat) {
  auto a = create_rng(0, 0);
  auto b = create_rng(0, 0);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a(), b());
  }
}

TEST(RngStream, DistinctStreamsDiffer) {
  auto a = create_rng(0, 0);
  auto b = create_rng(0, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    equal += a() == b() ? 1 : 0;
  }
  EXPECT_EQ(equal, 0);
}

TEST(RngStream, UniformMean) {
  auto rng = create_rng(42, 0);
  double sum = 0.0;
  constexpr int kN = 1'000'000;
  for (int i = 0; i < kN; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kN, 0.5, 0.002);
}

TEST(RngStream, UniformPosNeverZero) {
  auto rng = create_rng(3, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_pos();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(StandardNormal, EmptyRequest) {
  auto rng = create_rng(1, 0);
  EXPECT_TRUE(ratio_mc::standard_normal(rng, 0).empty());
}

TEST(StandardNormal, VarianceAndSymmetry) {
  auto rng = create_rng(7, 0);
  const auto z = ratio_mc::standard_normal(rng, 1'000'000);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z) {
    var += (v - mean) * (v - mean);
  }
  var /= static_cast<double>(z.size() - 1);
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
  const auto nonpositive = std::count_if(z.begin(), z.end(), [](double v) { return v <= 0.0; });
  const double frac = static_cast<double>(nonpositive) / static_cast<double>(z.size());
  EXPECT_GE(frac, 0.498);
  EXPECT_LE(frac, 0.502);
}

TEST(RngStream, UniformIndexCoversRangeEvenly) {
  auto rng = create_rng(11, 0);
  std::vector<int> counts(7, 0);
  constexpr int kN = 70000;
  for (int i = 0; i < kN; ++i) {
    const auto k = rng.uniform_index(7);
    ASSERT_LT(k, 7U);
    ++counts[k];
  }
  // Binomial sd is about 90; 5 sd band.
  for (int c : counts) {
    EXPECT_NEAR(c, kN / 7, 450);
  }
}

TEST(RngStream, ParallelWorkersMatchSerialStreams) {
  constexpr int kWorkers = 4;
  std::vector<std::vector<std::uint64_t>> parallel(kWorkers);
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < kWorkers; ++w) {
      threads.emplace_back([&parallel, w] {
        auto rng = create_rng(99, static_cast<std::uint64_t>(w));
        for (int i = 0; i < 1000; ++i) {
          parallel[w].push_back(rng());
        }
      });
    }
  }
  for (int w = 0; w < kWorkers; ++w) {
    auto rng = create_rng(99, static_cast<std::uint64_t>(w));
    for (int i = 0; i < 1000; ++i) {
      ASSERT_EQ(parallel[w][i], rng());
    }
  }
}

TEST(Shuffle, IsAPermutationAndDeterministic) {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  auto r1 = create_rng(5, 1);
  auto r2 = create_rng(5, 1);
  ratio_mc::shuffle(a, r1);
  ratio_mc::shuffle(b, r2);
  EXPECT_EQ(a, b);
  std::set<int> seen(a.begin(), a.end());
  EXPECT_EQ(seen.size(), 50U);
}

TEST(Linalg, SoftplusAndSigmoidAreStable) {
  EXPECT_DOUBLE_EQ(ratio_mc::softplus(800.0), 800.0);
  EXPECT_GT(ratio_mc::softplus(-800.0), -1.0);
  EXPECT_EQ(ratio_mc::sigmoid(0.0), 0.5);
  EXPECT_EQ(ratio_mc::sigmoid(-1000.0), 0.0);
  EXPECT_EQ(ratio_mc::sigmoid(1000.0), 1.0);
  EXPECT_NEAR(ratio_mc::logit(0.75), std::log(3.0), 1e-15);
}

TEST(Linalg, CholeskyRejectsIndefinite) {
  ratio_mc::Mat m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  EXPECT_FALSE(ratio_mc::cholesky_lower(m).has_value());
  m << 4.0, 2.0, 2.0, 3.0;
  const auto l = ratio_mc::cholesky_lower(m);
  ASSERT_TRUE(l.has_value());
  EXPECT_TRUE(((*l) * l->transpose()).isApprox(m, 1e-14));
}

}  // namespace
