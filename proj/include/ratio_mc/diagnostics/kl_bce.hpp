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

#ifndef RATIO_MC_DIAGNOSTICS_KL_BCE_HPP
#define RATIO_MC_DIAGNOSTICS_KL_BCE_HPP

#include <ratio_mc/classifier/posterior.hpp>
#include <ratio_mc/diagnostics/quadrature.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>

#include <array>
#include <cmath>

namespace ratio_mc {

/// Quadrature values of the cross-entropy and KL terms for one candidate posterior.
struct KlBceTerms {
  /// E_h(x)[ KL( h(k|x) || Bernoulli(r(x)) ) ].
  double kl_term = 0.0;
  /// E_h(x,k)[ -log r(k|x) ], the population value of BCE / N.
  double expected_bce_per_sample = 0.0;
  /// expected_bce_per_sample - kl_term; independent of the posterior.
  double additive_gap = 0.0;
  /// E_h(x)[ H(h(k|x)) ], integrated separately as a cross-check of `additive_gap`.
  double conditional_entropy = 0.0;
};

/// Integrates the KL and cross-entropy terms of the joint label/observation model on `grid`.
/**
 * The reference joint law is h(x, k) with prior n1 / (n1 + n0) on k = 1, class densities p1
 * and p0. The candidate replaces h(k | x) by Bernoulli(r(x)) with r clamped to [eps, 1 - eps].
 */
inline KlBceTerms kl_bce_consistency(const Distribution& p1, const Distribution& p0, std::size_t n1, std::size_t n0,
                                     const PosteriorFn& posterior, const Grid& grid,
                                     double eps = kDefaultClampEps) {
  if (!p1.has_density() || !p0.has_density()) {
    throw UnsupportedDensity("kl_bce_consistency: both distributions need a closed-form density");
  }
  if (static_cast<Eigen::Index>(grid.dim()) != p1.dim() || p1.dim() != p0.dim()) {
    throw DimensionMismatch("kl_bce_consistency: grid and distribution dimensions differ");
  }
  const double total = static_cast<double>(n1 + n0);
  const double log_lambda1 = std::log(static_cast<double>(n1) / total);
  const double log_lambda0 = std::log(static_cast<double>(n0) / total);
  const double log_prior_odds = std::log(static_cast<double>(n1)) - std::log(static_cast<double>(n0));

  KlBceTerms out;
  grid.for_each([&](const Vec& x, double w) {
    const double lp1 = p1.log_pdf(x);
    const double lp0 = p0.log_pdf(x);
    const std::array<double, 2> joint{log_lambda1 + lp1, log_lambda0 + lp0};
    const double h = std::exp(log_sum_exp(joint));
    if (h == 0.0) {
      return;
    }
    const double zt = log_prior_odds + lp1 - lp0;
    const double t = sigmoid(zt);
    const double zr = clamp_logit(posterior.logit_at(x), eps);
    const double ce = t * softplus(-zr) + (1.0 - t) * softplus(zr);
    const double kl = t * (softplus(-zr) - softplus(-zt)) + (1.0 - t) * (softplus(zr) - softplus(zt));
    const double ent = t * softplus(-zt) + (1.0 - t) * softplus(zt);
    out.expected_bce_per_sample += w * h * ce;
    out.kl_term += w * h * kl;
    out.conditional_entropy += w * h * ent;
  });
  out.additive_gap = out.expected_bce_per_sample - out.kl_term;
  return out;
}

}  // namespace ratio_mc

#endif
