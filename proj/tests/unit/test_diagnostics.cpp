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

#include <ratio_mc/diagnostics/ess.hpp>
#include <ratio_mc/diagnostics/kl_bce.hpp>
#include <ratio_mc/diagnostics/ks.hpp>
#include <ratio_mc/diagnostics/quadrature.hpp>
#include <ratio_mc/diagnostics/report.hpp>

#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace {

using ratio_mc::Distribution;
using ratio_mc::Gaussian;
using ratio_mc::Grid;
using ratio_mc::PosteriorFn;
using ratio_mc::Vec;
using ratio_mc::create_rng;

Distribution normal_1d(double sigma) { return Gaussian::isotropic(Vec::Zero(1), sigma); }

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  auto rng = create_rng(seed, stream);
  return ratio_mc::standard_normal(rng, n);
}

TEST(KolmogorovSurvival, MatchesReferenceValues) {
  // scipy.stats.kstwobign.sf
  const std::vector<std::pair<double, double>> ref{{0.3, 0.9999906941986655},   {0.5, 0.9639452436648751},
                                                   {1.0, 0.26999967167735456},  {1.17, 0.12939004218561884},
                                                   {1.19, 0.11774229287977166}, {1.5, 0.022217962616525127},
                                                   {2.5, 7.453306344157342e-06}};
  for (const auto& [lambda, sf] : ref) {
    EXPECT_NEAR(ratio_mc::kolmogorov_survival(lambda), sf, 1e-12 + 1e-10 * sf) << lambda;
  }
  EXPECT_EQ(ratio_mc::kolmogorov_survival(0.0), 1.0);
  EXPECT_EQ(ratio_mc::kolmogorov_survival(40.0), 0.0);
}

TEST(KolmogorovSurvival, BranchesAgreeAtSwitch) {
  // Evaluate the alternating series just below the switch by hand.
  const double lambda = 1.1799999;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    sum += (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  EXPECT_NEAR(ratio_mc::kolmogorov_survival(lambda), 2.0 * sum, 1e-14);
}

TEST(KsTwoSample, IdenticalSamples) {
  const auto a = normal_draws(500, 1, 0);
  const auto r = ratio_mc::ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTwoSample, DisjointSupports) {
  const std::vector<double> a{0.0};
  const std::vector<double> b{1.0};
  EXPECT_EQ(ratio_mc::ks_two_sample(a, b).statistic, 1.0);
}

TEST(KsTwoSample, MatchesBruteForceWithTies) {
  auto rng = create_rng(2, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t na = 1 + rng.uniform_index(60);
    const std::size_t nb = 1 + rng.uniform_index(60);
    std::vector<double> a(na);
    std::vector<double> b(nb);
    // Coarse rounding forces many ties within and across samples.
    for (auto& v : a) {
      v = std::round(3.0 * rng.normal()) / 2.0;
    }
    for (auto& v : b) {
      v = std::round(3.0 * rng.normal() + 1.0) / 2.0;
    }
    ASSERT_NEAR(ratio_mc::ks_two_sample(a, b).statistic, ratio_mc::testing::brute_force_ks(a, b), 1e-15);
  }
}

TEST(KsTwoSample, PValueUsesEffectiveSize) {
  const auto a = normal_draws(300, 3, 0);
  const auto b = normal_draws(700, 3, 1);
  const auto r = ratio_mc::ks_two_sample(a, b);
  EXPECT_GE(r.statistic, 0.0);
  EXPECT_LE(r.statistic, 1.0);
  EXPECT_NEAR(r.p_value, ratio_mc::kolmogorov_survival(std::sqrt(300.0 * 700.0 / 1000.0) * r.statistic), 1e-15);
}

TEST(KsTwoSample, RepetitionStudy) {
  int passed = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto a = normal_draws(10000, 100 + rep, 0);
    const auto b = normal_draws(10000, 100 + rep, 1);
    passed += ratio_mc::ks_two_sample(a, b).p_value > 1e-3 ? 1 : 0;
  }
  EXPECT_GE(passed, 99);
}

TEST(KsTwoSample, DetectsShift) {
  auto b = normal_draws(2000, 4, 1);
  for (auto& v : b) {
    v += 0.5;
  }
  EXPECT_LT(ratio_mc::ks_two_sample(normal_draws(2000, 4, 0), b).p_value, 1e-6);
}

ratio_mc::Points gaussian_cloud(Vec mean, std::size_t n, std::uint64_t seed) {
  auto rng = create_rng(seed, 0);
  const Distribution g = Gaussian::isotropic(std::move(mean), 1.0);
  return g.sample(n, rng);
}

TEST(TwoSampleReport, IdenticalSets) {
  const auto a = gaussian_cloud(Vec::Zero(2), 1000, 5);
  auto rng = create_rng(5, 31);
  const auto r = ratio_mc::two_sample_report(a, a, 10, rng);
  ASSERT_EQ(r.marginals.size(), 2U);
  ASSERT_EQ(r.projections.size(), 10U);
  EXPECT_EQ(r.n_tests(), 12U);
  for (const auto* group : {&r.marginals, &r.projections}) {
    for (const auto& m : *group) {
      EXPECT_EQ(m.ks.statistic, 0.0);
      EXPECT_EQ(m.mean_delta, 0.0);
      EXPECT_EQ(m.variance_delta, 0.0);
      EXPECT_NEAR(m.direction.norm(), 1.0, 1e-15);
    }
  }
  EXPECT_TRUE(r.passes(1e-3));
  EXPECT_EQ(r.projection_seed, 5U);
  EXPECT_EQ(r.projection_stream, 31U);
}

TEST(TwoSampleReport, MeanShiftRejected) {
  const auto a = gaussian_cloud(Vec::Zero(2), 10000, 6);
  const auto b = gaussian_cloud(Vec{{3.0, 0.0}}, 10000, 7);
  auto rng = create_rng(6, 31);
  const auto r = ratio_mc::two_sample_report(a, b, 10, rng);
  EXPECT_LT(r.marginals[0].ks.p_value, 1e-6);
  EXPECT_NEAR(r.marginals[0].mean_delta, -3.0, 0.1);
  EXPECT_FALSE(r.passes(1e-3));
}

TEST(TwoSampleReport, BonferroniCorrection) {
  const auto a = gaussian_cloud(Vec::Zero(2), 2000, 8);
  const auto b = gaussian_cloud(Vec::Zero(2), 2000, 9);
  auto rng = create_rng(8, 31);
  const auto r = ratio_mc::two_sample_report(a, b, 10, rng);
  double smallest = 1.0;
  for (const auto* group : {&r.marginals, &r.projections}) {
    for (const auto& m : *group) {
      smallest = std::min(smallest, m.ks.p_value);
    }
  }
  EXPECT_EQ(r.min_corrected_p_value(), std::min(1.0, 12.0 * smallest));
  EXPECT_TRUE(r.passes(1e-3));
}

TEST(TwoSampleReport, MarginalsOnly) {
  const auto a = gaussian_cloud(Vec::Zero(2), 100, 10);
  auto rng = create_rng(10, 31);
  const auto r = ratio_mc::two_sample_report(a, gaussian_cloud(Vec::Zero(2), 100, 11), 0, rng);
  EXPECT_EQ(r.marginals.size(), 2U);
  EXPECT_TRUE(r.projections.empty());
}

TEST(TwoSampleReport, DimensionMismatch) {
  const auto a = gaussian_cloud(Vec::Zero(2), 10, 12);
  const auto b = gaussian_cloud(Vec::Zero(3), 10, 13);
  auto rng = create_rng(12, 31);
  EXPECT_THROW((void)ratio_mc::two_sample_report(a, b, 2, rng), ratio_mc::DimensionMismatch);
}

TEST(Ess, Examples) {
  EXPECT_NEAR(ratio_mc::ess(std::vector<double>(100, 0.37)), 100.0, 1e-12);
  EXPECT_EQ(ratio_mc::ess(std::vector<double>{0.0, 0.0, 4.2, 0.0}), 1.0);
  EXPECT_NEAR(ratio_mc::ess(std::vector<double>{1.0, 1.0, 2.0}), 16.0 / 6.0, 1e-15);
}

TEST(Ess, Errors) {
  EXPECT_THROW((void)ratio_mc::ess(std::vector<double>{0.0, 0.0}), ratio_mc::AllZeroWeights);
  EXPECT_THROW((void)ratio_mc::ess(std::vector<double>{1.0, -1.0}), ratio_mc::InvalidArgument);
}

TEST(Ess, BoundsProperty) {
  auto rng = create_rng(14, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(200);
    std::vector<double> w(n);
    for (auto& v : w) {
      v = rng.uniform() < 0.2 ? 0.0 : std::exp(3.0 * rng.normal());
    }
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
      w[0] = 1.0;
    }
    const double e = ratio_mc::ess(w);
    ASSERT_GE(e, 1.0 - 1e-12);
    ASSERT_LE(e, static_cast<double>(n) * (1.0 + 1e-12));
  }
  // Tiny and huge weights alike.
  EXPECT_NEAR(ratio_mc::ess(std::vector<double>(10, 1e-300)), 10.0, 1e-12);
  EXPECT_NEAR(ratio_mc::ess(std::vector<double>(10, 1e300)), 10.0, 1e-12);
}

const Grid& wide_line() {
  static const Grid g = Grid::line(-20.0, 20.0, 10000);
  return g;
}

TEST(Quadrature, TrapezoidIntegratesGaussian) {
  const double v = wide_line().integrate([](const Vec& x) { return ratio_mc::testing::normal_pdf(x[0], 0.0, 2.0); });
  EXPECT_NEAR(v, 1.0, 1e-12);
  const auto sq = Grid::square(-8.0, 8.0, 300);
  EXPECT_EQ(sq.size(), 90000U);
  EXPECT_NEAR(sq.integrate([](const Vec& x) { return std::exp(-0.5 * x.squaredNorm()) / (2.0 * std::numbers::pi); }),
              1.0, 1e-10);
  EXPECT_THROW((Grid{{{1.0, 0.0, 10}}}), ratio_mc::InvalidArgument);
  EXPECT_THROW((Grid{{{0.0, 1.0, 1}}}), ratio_mc::InvalidArgument);
}

TEST(KlBce, OracleHasZeroKl) {
  const auto r = ratio_mc::oracle_posterior(normal_1d(1), normal_1d(2), 1, 1);
  const auto t = ratio_mc::kl_bce_consistency(normal_1d(1), normal_1d(2), 1, 1, r, wide_line());
  EXPECT_LT(std::abs(t.kl_term), 1e-8);
  EXPECT_NEAR(t.expected_bce_per_sample, ratio_mc::testing::kBayesCrossEntropy, 1e-8);
  EXPECT_NEAR(t.additive_gap, t.conditional_entropy, 1e-12);
}

TEST(KlBce, SymmetricCase) {
  const auto t =
      ratio_mc::kl_bce_consistency(normal_1d(1), normal_1d(1), 5, 5, PosteriorFn::constant(0.5), wide_line());
  EXPECT_LT(std::abs(t.kl_term), 1e-12);
  EXPECT_NEAR(t.expected_bce_per_sample, std::log(2.0), 1e-10);
}

TEST(KlBce, ConstantHalfAgainstMonteCarlo) {
  const auto t =
      ratio_mc::kl_bce_consistency(normal_1d(1), normal_1d(2), 1, 1, PosteriorFn::constant(0.5), wide_line());
  EXPECT_NEAR(t.kl_term, ratio_mc::testing::kKlAtHalf, 1e-8);
  // Independent estimate: x from the balanced mixture, KL of the true posterior to a fair coin.
  auto rng = create_rng(15, 0);
  constexpr std::size_t kN = 1000000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < kN; ++i) {
    const double sigma = rng.uniform() < 0.5 ? 1.0 : 2.0;
    const double x = sigma * rng.normal();
    const double p1 = ratio_mc::testing::normal_pdf(x, 0, 1);
    const double p0 = ratio_mc::testing::normal_pdf(x, 0, 2);
    const double h = p1 / (p1 + p0);
    const double kl = h * std::log(2.0 * h) + (1.0 - h) * std::log(2.0 * (1.0 - h));
    sum += kl;
    sum_sq += kl * kl;
  }
  const double mean = sum / kN;
  const double sd = std::sqrt((sum_sq / kN - mean * mean) / kN);
  EXPECT_LT(std::abs(mean - t.kl_term), 3.0 * sd);
}

TEST(KlBce, CrossEntropyDifferenceIsKlDifference) {
  const Distribution p1 = normal_1d(1);
  const Distribution p0 = normal_1d(2);
  const auto oracle = ratio_mc::oracle_posterior(p1, p0, 1, 1);
  std::vector<PosteriorFn> candidates{
      oracle,
      PosteriorFn::constant(0.5),
      PosteriorFn::constant(0.8),
      PosteriorFn{"shifted", [oracle](const Vec& x) { return oracle.logit_at(x) + 0.7; }},
      PosteriorFn{"scaled", [oracle](const Vec& x) { return 1.8 * oracle.logit_at(x); }},
      PosteriorFn{"tilted", [](const Vec& x) { return 0.3 * x[0] - 0.2; }},
  };
  std::vector<ratio_mc::KlBceTerms> terms;
  for (const auto& c : candidates) {
    terms.push_back(ratio_mc::kl_bce_consistency(p1, p0, 1, 1, c, wide_line()));
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    EXPECT_NEAR(terms[i].additive_gap, terms[0].conditional_entropy, 1e-8) << candidates[i].name();
    EXPECT_GE(terms[i].kl_term, -1e-12);
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const double d_ce = terms[i].expected_bce_per_sample - terms[j].expected_bce_per_sample;
      const double d_kl = terms[i].kl_term - terms[j].kl_term;
      ASSERT_NEAR(d_ce, d_kl, 1e-8);
    }
  }
}

TEST(KlBce, UnequalClassSizes2d) {
  const Distribution p1 = ratio_mc::GaussianMixture::circle(4, 1.5, 0.4);
  const Distribution p0 = Gaussian::isotropic(Vec::Zero(2), 2.0);
  const auto oracle = ratio_mc::oracle_posterior(p1, p0, 300, 100);
  const auto grid = Grid::square(-12.0, 12.0, 400);
  const auto t = ratio_mc::kl_bce_consistency(p1, p0, 300, 100, oracle, grid);
  EXPECT_LT(std::abs(t.kl_term), 1e-8);
  const auto half = ratio_mc::kl_bce_consistency(p1, p0, 300, 100, PosteriorFn::constant(0.5), grid);
  EXPECT_GT(half.kl_term, 0.0);
  EXPECT_NEAR(half.additive_gap, t.additive_gap, 1e-8);
}

TEST(KlBce, NeedsDensities) {
  const Distribution moons = ratio_mc::TwoMoons{0.1};
  EXPECT_THROW((void)ratio_mc::kl_bce_consistency(moons, moons, 1, 1, PosteriorFn::constant(0.5), Grid::square(-1, 1, 3)),
               ratio_mc::UnsupportedDensity);
}

TEST(KlBce, EmpiricalBceConverges) {
  const Distribution p1 = normal_1d(1);
  const Distribution p0 = normal_1d(2);
  const auto oracle = ratio_mc::oracle_posterior(p1, p0, 1, 1);
  const double expected = ratio_mc::kl_bce_consistency(p1, p0, 1, 1, oracle, wide_line()).expected_bce_per_sample;
  // Per-sample spread of the loss, from a large independent dataset.
  auto big_rng = create_rng(16, 1);
  const auto big = ratio_mc::build_dataset(p1, p0, 100000, 100000, big_rng);
  std::vector<double> per_sample;
  for (std::size_t i = 0; i < big.size(); ++i) {
    const double z = oracle.logit_at(big.points()[i]);
    per_sample.push_back(big.labels()[i] == 1 ? ratio_mc::softplus(-z) : ratio_mc::softplus(z));
  }
  const double sd = std::sqrt(ratio_mc::testing::variance(per_sample));
  for (std::size_t n : {1000U, 10000U, 100000U}) {
    auto rng = create_rng(17, n);
    const auto ds = ratio_mc::build_dataset(p1, p0, n / 2, n / 2, rng);
    const double err = std::abs(ratio_mc::bce_loss(oracle, ds) / static_cast<double>(n) - expected);
    EXPECT_LT(err, 3.0 * sd / std::sqrt(static_cast<double>(n))) << "N=" << n;
  }
}

}  // namespace
