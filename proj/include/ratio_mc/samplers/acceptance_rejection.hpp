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

#ifndef RATIO_MC_SAMPLERS_ACCEPTANCE_REJECTION_HPP
#define RATIO_MC_SAMPLERS_ACCEPTANCE_REJECTION_HPP

#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/ratio.hpp>
#include <ratio_mc/samplers/sample_set.hpp>

#include <cmath>
#include <optional>

namespace ratio_mc {

/// Proposal budget used when none is given: this many proposals per requested sample.
inline constexpr std::size_t kDefaultProposalBudgetFactor = 100;

/// Acceptance-rejection with an estimated ratio and an online envelope constant.
/**
 * Each proposal x ~ `proposal` is accepted with probability min(1, ratio_hat(x) / C), where C
 * is the envelope before x was seen; the envelope is then updated with x. Draw order per
 * proposal is fixed (point, then one uniform) so runs replay exactly. Proposals whose ratio
 * exceeds C are counted as cap events. Stops after `n_target` acceptances or when the budget
 * runs out, in which case `meta.budget_exhausted` is set and the partial set is returned.
 */
inline SampleSet ar_sample(const RatioEstimator& est, EnvelopeConstant envelope, const Distribution& proposal,
                           std::size_t n_target, std::optional<std::size_t> max_proposals, RngStream& rng) {
  if (n_target == 0) {
    throw InvalidArgument("ar_sample: n_target must be >= 1");
  }
  if (!(envelope.value() > 0.0)) {
    throw InvalidArgument("ar_sample: envelope constant must be positive");
  }
  const std::size_t budget = max_proposals.value_or(kDefaultProposalBudgetFactor * n_target);
  SampleSet out;
  out.meta.sampler = "ar";
  out.meta.seed = rng.seed();
  out.meta.stream_id = rng.stream_id();
  out.points.reserve(n_target);
  while (out.points.size() < n_target) {
    if (out.meta.n_proposed == budget) {
      out.meta.budget_exhausted = true;
      break;
    }
    Vec x = proposal.sample_one(rng);
    const auto ev = est.evaluate(x);
    ++out.meta.n_proposed;
    out.meta.clamp_events += ev.clamped ? 1 : 0;
    const double log_ratio = est.log_prefactor() + ev.log_odds;
    const double log_alpha = log_ratio - envelope.log_value;
    if (log_alpha > 0.0) {
      ++out.meta.cap_events;
    }
    const double u = rng.uniform();
    const bool accept = u < std::exp(std::min(0.0, log_alpha));
    envelope.offer(log_ratio, x);
    if (accept) {
      out.points.push_back(std::move(x));
    }
  }
  out.meta.n_accepted = out.points.size();
  out.meta.c_final = envelope.value();
  return out;
}

/// Fraction of proposals accepted.
inline double acceptance_rate(const SampleSet& s) {
  return s.meta.n_proposed == 0 ? 0.0 : static_cast<double>(s.meta.n_accepted) / static_cast<double>(s.meta.n_proposed);
}

}  // namespace ratio_mc

#endif
