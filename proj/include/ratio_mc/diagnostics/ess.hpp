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

#ifndef RATIO_MC_DIAGNOSTICS_ESS_HPP
#define RATIO_MC_DIAGNOSTICS_ESS_HPP

#include <ratio_mc/errors.hpp>

#include <cmath>
#include <span>

namespace ratio_mc {

/// Effective sample size (sum w)^2 / sum w^2 of nonnegative importance weights.
/**
 * Equals N for uniform weights and 1 when a single weight carries everything. Weights are
 * rescaled by their maximum first so tiny or huge magnitudes do not under- or overflow.
 */
inline double ess(std::span<const double> weights) {
  double top = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("ess: weights must be finite and nonnegative");
    }
    top = std::max(top, w);
  }
  if (top == 0.0) {
    throw AllZeroWeights("ess: no positive weight");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : weights) {
    const double s = w / top;
    sum += s;
    sum_sq += s * s;
  }
  return sum * sum / sum_sq;
}

}  // namespace ratio_mc

#endif
