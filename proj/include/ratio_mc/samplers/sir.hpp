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

#ifndef RATIO_MC_SAMPLERS_SIR_HPP
#define RATIO_MC_SAMPLERS_SIR_HPP

#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/diagnostics/ess.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/ratio.hpp>
#include <ratio_mc/samplers/sample_set.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ratio_mc {

enum class ResamplingScheme {
  /// M iid draws from the weighted empirical measure.
  kMultinomial,
  /// One uniform offset and M evenly spaced points; lower variance, draws are not iid.
  kSystematic,
};

inline ResamplingScheme resampling_scheme_from_string(std::string_view name) {
  if (name == "multinomial") {
    return ResamplingScheme::kMultinomial;
  }
  if (name == "systematic") {
    return ResamplingScheme::kSystematic;
  }
  throw InvalidArgument("unknown resampling scheme '" + std::string(name) + "'");
}

inline std::string_view to_string(ResamplingScheme s) noexcept {
  return s == ResamplingScheme::kMultinomial ? "multinomial" : "systematic";
}

/// Weight share at or above which a single point is flagged as carrying everything.
inline constexpr double kDegenerateWeightShare = 1.0 - 1e-9;

/// Normalized weights proportional to exp(log_weights).
inline std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) {
    return {};
  }
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - top);
    total += w[i];
  }
  for (auto& v : w) {
    v /= total;
  }
  return w;
}

/// Indices of `m` points resampled from normalized `weights`.
inline std::vector<std::size_t> resample_indices(std::span<const double> weights, std::size_t m,
                                                 ResamplingScheme scheme, RngStream& rng) {
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }
  auto locate = [&](double u) {
    // Scaled by the total so rounding in the cumulative sum cannot push u past the end.
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * acc);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), weights.size() - 1);
  };
  std::vector<std::size_t> idx(m);
  if (scheme == ResamplingScheme::kMultinomial) {
    for (auto& i : idx) {
      i = locate(rng.uniform());
    }
  } else {
    const double offset = rng.uniform();
    for (std::size_t j = 0; j < m; ++j) {
      idx[j] = locate((static_cast<double>(j) + offset) / static_cast<double>(m));
    }
  }
  return idx;
}

struct SirResult {
  /// The N proposals with their normalized weights.
  SampleSet weighted;
  /// The M resampled points.
  SampleSet resampled;
  double ess = 0.0;
};

/// Sampling-importance-resampling with estimated ratios as unnormalized weights.
/**
 * Weights are exp of the clamped log-odds; the n0/n1 prefactor cancels on normalization and
 * is never applied. `degenerate_weights` is flagged (not thrown) when one point carries at
 * least 1 - 1e-9 of the total mass.
 */
inline SirResult sir_sample(const RatioEstimator& est, const Distribution& proposal, std::size_t n_proposals,
                            std::size_t m_resampled, ResamplingScheme scheme, RngStream& rng) {
  if (n_proposals == 0 || m_resampled == 0) {
    throw InvalidArgument("sir_sample: n_proposals and m_resampled must be >= 1");
  }
  SirResult out;
  auto& weighted = out.weighted;
  weighted.points = proposal.sample(n_proposals, rng);
  const auto evals = est.evaluate(std::span<const Vec>(weighted.points));
  std::vector<double> log_w(n_proposals);
  std::size_t clamps = 0;
  for (std::size_t i = 0; i < n_proposals; ++i) {
    log_w[i] = evals[i].log_odds;
    clamps += evals[i].clamped ? 1 : 0;
  }
  auto w = normalize_log_weights(log_w);
  const bool degenerate = *std::max_element(w.begin(), w.end()) >= kDegenerateWeightShare;
  out.ess = ess(w);

  const auto idx = resample_indices(w, m_resampled, scheme, rng);
  out.resampled.points.reserve(m_resampled);
  for (auto i : idx) {
    out.resampled.points.push_back(weighted.points[i]);
  }

  for (auto* set : {&out.weighted, &out.resampled}) {
    set->meta.sampler = set == &out.weighted ? "sir-weighted" : "sir";
    set->meta.seed = rng.seed();
    set->meta.stream_id = rng.stream_id();
    set->meta.n_proposed = n_proposals;
    set->meta.n_accepted = set->points.size();
    set->meta.clamp_events = clamps;
    set->meta.degenerate_weights = degenerate;
  }
  weighted.weights = std::move(w);
  return out;
}

}  // namespace ratio_mc

#endif
