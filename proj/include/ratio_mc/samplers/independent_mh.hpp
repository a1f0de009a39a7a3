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

#ifndef RATIO_MC_SAMPLERS_INDEPENDENT_MH_HPP
#define RATIO_MC_SAMPLERS_INDEPENDENT_MH_HPP

#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/ratio.hpp>
#include <ratio_mc/samplers/sample_set.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>
#include <vector>

namespace ratio_mc {

/// log of min(1, ratio(x*) / ratio(x_t)) given both clamped log-odds.
/**
 * The n0/n1 prefactor cancels, so only log-odds enter and a rescaled estimator yields
 * bit-identical decisions.
 */
constexpr double imh_log_acceptance(double log_odds_proposed, double log_odds_current) noexcept {
  return std::min(0.0, log_odds_proposed - log_odds_current);
}

/// Independent Metropolis-Hastings driven by an estimated ratio.
/**
 * The initial state is `init` or, if absent, a draw from the proposal. Every step draws
 * x* ~ proposal; a uniform is drawn only when the acceptance probability is below one, so a
 * constant ratio reproduces the proposal stream point for point. The first `burn_in` states
 * are dropped; `acceptance_rate` counts every step.
 */
inline ChainResult imh_chain(const RatioEstimator& est, const Distribution& proposal, std::size_t n_steps,
                             std::size_t burn_in, const std::optional<Vec>& init, RngStream& rng) {
  if (n_steps <= burn_in) {
    throw InvalidArgument("imh_chain: n_steps must exceed burn_in");
  }
  ChainResult out;
  out.burn_in = burn_in;
  out.meta.sampler = "imh";
  out.meta.seed = rng.seed();
  out.meta.stream_id = rng.stream_id();
  Vec current = init ? *init : proposal.sample_one(rng);
  if (current.size() != proposal.dim()) {
    throw DimensionMismatch("imh_chain: initial state dimension");
  }
  auto ev = est.evaluate(current);
  out.meta.clamp_events += ev.clamped ? 1 : 0;
  double current_log_odds = ev.log_odds;
  out.states.reserve(n_steps - burn_in);
  std::size_t accepted = 0;
  for (std::size_t step = 0; step < n_steps; ++step) {
    Vec candidate = proposal.sample_one(rng);
    ev = est.evaluate(candidate);
    out.meta.clamp_events += ev.clamped ? 1 : 0;
    const double log_alpha = imh_log_acceptance(ev.log_odds, current_log_odds);
    const bool accept = log_alpha >= 0.0 || rng.uniform() < std::exp(log_alpha);
    if (accept) {
      current = std::move(candidate);
      current_log_odds = ev.log_odds;
      ++accepted;
    }
    if (step >= burn_in) {
      out.states.push_back(current);
    }
  }
  out.meta.n_proposed = n_steps;
  out.meta.n_accepted = accepted;
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_steps);
  return out;
}

/// Runs `n_chains` independent chains on worker threads, chain c on stream `first_stream + c`.
/**
 * States are concatenated in chain order and the acceptance rate pooled, so the result does
 * not depend on thread scheduling.
 */
inline ChainResult imh_chains(const RatioEstimator& est, const Distribution& proposal, std::size_t n_chains,
                              std::size_t n_steps, std::size_t burn_in, std::uint64_t seed,
                              std::uint64_t first_stream) {
  if (n_chains == 0) {
    throw InvalidArgument("imh_chains: need at least one chain");
  }
  if (n_steps <= burn_in) {
    throw InvalidArgument("imh_chains: n_steps must exceed burn_in");
  }
  std::vector<ChainResult> results(n_chains);
  {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < n_chains; ++c) {
      workers.emplace_back([&, c] {
        auto rng = create_rng(seed, first_stream + c);
        results[c] = imh_chain(est, proposal, n_steps, burn_in, std::nullopt, rng);
      });
    }
  }
  ChainResult merged;
  merged.burn_in = burn_in;
  merged.meta.sampler = "imh";
  merged.meta.seed = seed;
  merged.meta.stream_id = first_stream;
  for (auto& r : results) {
    merged.states.insert(merged.states.end(), r.states.begin(), r.states.end());
    merged.meta.n_proposed += r.meta.n_proposed;
    merged.meta.n_accepted += r.meta.n_accepted;
    merged.meta.clamp_events += r.meta.clamp_events;
  }
  merged.acceptance_rate =
      static_cast<double>(merged.meta.n_accepted) / static_cast<double>(merged.meta.n_proposed);
  return merged;
}

}  // namespace ratio_mc

#endif
