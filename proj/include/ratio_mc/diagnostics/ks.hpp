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

#ifndef RATIO_MC_DIAGNOSTICS_KS_HPP
#define RATIO_MC_DIAGNOSTICS_KS_HPP

#include <ratio_mc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace ratio_mc {

/// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
/**
 * Both classical series are truncated at 100 terms: the alternating series
 * 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2) for lambda >= 1.18, and the theta-function form of
 * the CDF, sqrt(2 pi) / lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2)), below it where the
 * alternating series converges too slowly.
 */
inline double kolmogorov_survival(double lambda) {
  constexpr int kTerms = 100;
  if (!(lambda > 0.0)) {
    return 1.0;
  }
  if (lambda < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= kTerms; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= kTerms; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with right-continuous empirical CDFs.
/**
 * The statistic is the exact sup |F_a - F_b|, evaluated after all tied values have been
 * absorbed. The p-value is asymptotic, using the effective size n_a n_b / (n_a + n_b).
 */
inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("ks_two_sample: both samples must be nonempty");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) {
      ++i;
    }
    while (j < sb.size() && sb[j] == v) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, kolmogorov_survival(std::sqrt(n_eff) * d)};
}

}  // namespace ratio_mc

#endif
