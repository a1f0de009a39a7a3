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

#ifndef RATIO_MC_SAMPLERS_IMPORTANCE_HPP
#define RATIO_MC_SAMPLERS_IMPORTANCE_HPP

#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/ratio.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ratio_mc {

/// A function whose expectation under the target is wanted.
struct Integrand {
  std::function<double(const Vec&)> f;
  std::string name;
};

struct IsEstimate {
  double estimate = 0.0;
  /// Delta-method standard error of the ratio estimator.
  double std_error = 0.0;
  double ess = 0.0;
  std::size_t clamp_events = 0;
};

/// Self-normalized importance sampling: sum w f / sum w with w = estimated ratio at x ~ proposal.
inline IsEstimate is_estimate(const RatioEstimator& est, const Distribution& proposal, const Integrand& f,
                              std::size_t n, RngStream& rng) {
  if (n < 2) {
    throw InvalidArgument("is_estimate: n must be >= 2");
  }
  const auto points = proposal.sample(n, rng);
  const auto evals = est.evaluate(std::span<const Vec>(points));
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& e : evals) {
    top = std::max(top, e.log_odds);
  }
  IsEstimate out;
  std::vector<double> w(n);
  std::vector<double> fx(n);
  double sum_w = 0.0;
  double sum_wf = 0.0;
  double sum_w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(evals[i].log_odds - top);
    fx[i] = f.f(points[i]);
    out.clamp_events += evals[i].clamped ? 1 : 0;
    sum_w += w[i];
    sum_wf += w[i] * fx[i];
    sum_w2 += w[i] * w[i];
  }
  out.estimate = sum_wf / sum_w;
  double var_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = fx[i] - out.estimate;
    var_acc += w[i] * w[i] * dev * dev;
  }
  out.std_error = std::sqrt(var_acc) / sum_w;
  out.ess = sum_w * sum_w / sum_w2;
  return out;
}

}  // namespace ratio_mc

#endif
