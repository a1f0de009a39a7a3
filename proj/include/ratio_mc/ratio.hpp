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

#ifndef RATIO_MC_RATIO_HPP
#define RATIO_MC_RATIO_HPP

#include <ratio_mc/classifier/posterior.hpp>
#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <utility>

/**
 * \file
 * \brief Density ratios from class posteriors.
 *
 * If r(x) approximates n1 p1(x) / (n1 p1(x) + n0 p0(x)), then (n0 / n1) r / (1 - r)
 * approximates p1(x) / p0(x). Everything here works with log-odds: the posterior's logit,
 * clamped so that r stays in [eps, 1 - eps].
 */

namespace ratio_mc {

/// A two-class probability carried together with its complement.
/**
 * Forming 1 - r by subtraction throws away the relative accuracy of the smaller class once r
 * is near 1, so r / (1 - r) built that way drifts by about ulp(1) / (1 - r). Keeping both
 * masses holds the odds to a few ulps.
 */
struct ClassProbability {
  double r;
  double complement;

  /// r = a / (a + b) for nonnegative masses with a positive sum.
  static ClassProbability from_masses(double a, double b) {
    if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0) || !std::isfinite(a + b)) {
      throw InvalidArgument("class probability: masses must be finite, nonnegative, not both zero");
    }
    const double total = a + b;
    return {a / total, b / total};
  }

  [[nodiscard]] double odds() const noexcept { return r / complement; }
  [[nodiscard]] double log_odds() const noexcept { return std::log(r) - std::log(complement); }
};

/// Result of one ratio evaluation.
struct OddsEvaluation {
  /// Clamped logit of the posterior, log(r / (1 - r)).
  double log_odds;
  /// True when the clamp changed the logit.
  bool clamped;
};

/// x -> (n0 / n1) r(x) / (1 - r(x)), an estimate of p1(x) / p0(x).
class RatioEstimator {
 public:
  RatioEstimator(PosteriorFn posterior, std::size_t n0, std::size_t n1, double clamp_eps = kDefaultClampEps)
      : posterior_{std::move(posterior)}, n0_{n0}, n1_{n1}, clamp_eps_{clamp_eps} {
    if (n0 == 0 || n1 == 0) {
      throw InvalidArgument("ratio estimator: class counts must be positive");
    }
    if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
      throw InvalidArgument("ratio estimator: clamp_eps must lie in (0, 1/2)");
    }
    log_prefactor_ = std::log(static_cast<double>(n0)) - std::log(static_cast<double>(n1));
  }

  [[nodiscard]] const PosteriorFn& posterior() const noexcept { return posterior_; }
  [[nodiscard]] std::size_t n0() const noexcept { return n0_; }
  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] double clamp_eps() const noexcept { return clamp_eps_; }
  /// log(n0 / n1).
  [[nodiscard]] double log_prefactor() const noexcept { return log_prefactor_; }

  [[nodiscard]] OddsEvaluation evaluate(const Vec& x) const { return clamp(posterior_.logit_at(x)); }

  [[nodiscard]] std::vector<OddsEvaluation> evaluate(std::span<const Vec> points) const {
    const auto z = posterior_.logits(points);
    std::vector<OddsEvaluation> out;
    out.reserve(z.size());
    for (double v : z) {
      out.push_back(clamp(v));
    }
    return out;
  }

  /// Clamped log(r / (1 - r)); the ratio without the n0/n1 prefactor.
  [[nodiscard]] double log_odds(const Vec& x) const { return evaluate(x).log_odds; }

  [[nodiscard]] double log_ratio_hat(const Vec& x) const { return log_prefactor_ + log_odds(x); }

  [[nodiscard]] double ratio_hat(const Vec& x) const { return std::exp(log_ratio_hat(x)); }

 private:
  [[nodiscard]] OddsEvaluation clamp(double z) const {
    // NaN logits fall to the lower bound.
    const double zc = std::isnan(z) ? -logit(1.0 - clamp_eps_) : clamp_logit(z, clamp_eps_);
    return {zc, zc != z};
  }

  PosteriorFn posterior_;
  std::size_t n0_;
  std::size_t n1_;
  double clamp_eps_;
  double log_prefactor_ = 0.0;
};

/// Running maximum of the estimated ratio: the data-driven surrogate for sup p1/p0.
struct EnvelopeConstant {
  double log_value = -std::numeric_limits<double>::infinity();
  Vec argmax_point;
  std::size_t n_points_seen = 0;

  [[nodiscard]] double value() const noexcept { return std::exp(log_value); }

  /// Folds in one already-evaluated point.
  void offer(double log_ratio, const Vec& x) {
    ++n_points_seen;
    if (log_ratio > log_value) {
      log_value = log_ratio;
      argmax_point = x;
    }
  }

  /// Maximum of two envelopes, as produced by independent workers.
  [[nodiscard]] static EnvelopeConstant merge(const EnvelopeConstant& a, const EnvelopeConstant& b) {
    EnvelopeConstant out = a.log_value >= b.log_value ? a : b;
    out.n_points_seen = a.n_points_seen + b.n_points_seen;
    return out;
  }
};

/// Maximum of `ratio_hat` over every point of `ds`, both labels included.
inline EnvelopeConstant estimate_C(const RatioEstimator& est, const LabeledDataset& ds) {
  if (ds.empty()) {
    throw InvalidArgument("estimate_C: empty dataset");
  }
  const auto evals = est.evaluate(std::span<const Vec>(ds.points()));
  EnvelopeConstant c;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    c.offer(est.log_prefactor() + evals[i].log_odds, ds.points()[i]);
  }
  return c;
}

inline EnvelopeConstant update_C(EnvelopeConstant c, const RatioEstimator& est, const Vec& x_new) {
  c.offer(est.log_ratio_hat(x_new), x_new);
  return c;
}

/// log of p0(x) r(x) / (1 - r(x)), the unnormalized density of accepted AR samples.
inline double log_p_phi_unnorm(const RatioEstimator& est, const Distribution& p0, const Vec& x) {
  return p0.log_pdf(x) + est.log_odds(x);
}

inline double p_phi_unnorm(const RatioEstimator& est, const Distribution& p0, const Vec& x) {
  return std::exp(log_p_phi_unnorm(est, p0, x));
}

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the normalizer: the mean of r / (1 - r) over `m` draws from `p0`.
inline MonteCarloEstimate p_phi_normalizer(const RatioEstimator& est, const Distribution& p0, std::size_t m,
                                           RngStream& rng) {
  if (m == 0) {
    throw InvalidArgument("p_phi_normalizer: m must be >= 1");
  }
  const auto z = p0.sample(m, rng);
  const auto evals = est.evaluate(std::span<const Vec>(z));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& e : evals) {
    const double odds = std::exp(e.log_odds);
    sum += odds;
    sum_sq += odds * odds;
  }
  const auto n = static_cast<double>(m);
  const double mean = sum / n;
  double se = 0.0;
  if (m > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {mean, se};
}

}  // namespace ratio_mc

#endif
