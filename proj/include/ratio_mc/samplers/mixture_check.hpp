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

#ifndef RATIO_MC_SAMPLERS_MIXTURE_CHECK_HPP
#define RATIO_MC_SAMPLERS_MIXTURE_CHECK_HPP

#include <ratio_mc/diagnostics/quadrature.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <limits>

namespace ratio_mc {

struct MixtureDecomposition {
  double min_reminder = std::numeric_limits<double>::infinity();
  double reminder_integral = 0.0;
};

/// Checks that q = (1/C) p + (1 - 1/C) g with g = (q - p/C) / (1 - 1/C) a density on `grid`.
/**
 * g is the law of the points acceptance-rejection discards. A valid envelope makes g
 * nonnegative everywhere and g integrates to one. Throws `InvalidC` for C <= 1, where the
 * decomposition has no second component.
 */
inline MixtureDecomposition mixture_decomposition_check(const Distribution& p, const Distribution& q, double c,
                                                        const Grid& grid) {
  if (!(c > 1.0) || !std::isfinite(c)) {
    throw InvalidC("mixture_decomposition_check: C must exceed 1, got " + std::to_string(c));
  }
  if (p.dim() != q.dim() || static_cast<Eigen::Index>(grid.dim()) != p.dim()) {
    throw DimensionMismatch("mixture_decomposition_check: dimensions differ");
  }
  const double keep = 1.0 - 1.0 / c;
  MixtureDecomposition out;
  grid.for_each([&](const Vec& x, double w) {
    const double reminder = (std::exp(q.log_pdf(x)) - std::exp(p.log_pdf(x)) / c) / keep;
    out.min_reminder = std::min(out.min_reminder, reminder);
    out.reminder_integral += w * reminder;
  });
  return out;
}

}  // namespace ratio_mc

#endif
