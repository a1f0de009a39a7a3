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

#ifndef RATIO_MC_DIAGNOSTICS_REPORT_HPP
#define RATIO_MC_DIAGNOSTICS_REPORT_HPP

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/diagnostics/ks.hpp>
#include <ratio_mc/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace ratio_mc {

/// KS result and first two moment differences along one direction.
struct MarginalComparison {
  Vec direction;
  KsResult ks;
  double mean_delta = 0.0;
  double variance_delta = 0.0;
};

struct TwoSampleReport {
  std::vector<MarginalComparison> marginals;
  std::vector<MarginalComparison> projections;
  std::uint64_t projection_seed = 0;
  std::uint64_t projection_stream = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;

  [[nodiscard]] std::size_t n_tests() const noexcept { return marginals.size() + projections.size(); }

  /// Bonferroni-adjusted p-value: min(1, p * number of tests).
  [[nodiscard]] double corrected(double p) const noexcept {
    return std::min(1.0, p * static_cast<double>(n_tests()));
  }

  [[nodiscard]] double min_corrected_p_value() const noexcept {
    double p = 1.0;
    for (const auto* group : {&marginals, &projections}) {
      for (const auto& m : *group) {
        p = std::min(p, corrected(m.ks.p_value));
      }
    }
    return p;
  }

  /// True when no test rejects at family-wise level `alpha`.
  [[nodiscard]] bool passes(double alpha) const noexcept { return min_corrected_p_value() > alpha; }
};

namespace detail {

inline MarginalComparison compare_along(std::span<const Vec> a, std::span<const Vec> b, const Vec& direction) {
  std::vector<double> pa(a.size());
  std::vector<double> pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[i] = direction.dot(a[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    pb[i] = direction.dot(b[i]);
  }
  auto moments = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) {
      mean += x;
    }
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) {
      var += (x - mean) * (x - mean);
    }
    return std::pair{mean, var / static_cast<double>(v.size())};
  };
  const auto [ma, va] = moments(pa);
  const auto [mb, vb] = moments(pb);
  return {direction, ks_two_sample(pa, pb), ma - mb, va - vb};
}

}  // namespace detail

/// Marginal KS tests plus `n_projections` KS tests along random unit directions.
inline TwoSampleReport two_sample_report(std::span<const Vec> a, std::span<const Vec> b, std::size_t n_projections,
                                         RngStream& rng) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("two_sample_report: both samples must be nonempty");
  }
  const auto d = a.front().size();
  for (const auto* set : {&a, &b}) {
    for (const auto& x : *set) {
      if (x.size() != d) {
        throw DimensionMismatch("two_sample_report: point dimensions differ");
      }
    }
  }
  TwoSampleReport report;
  report.n_a = a.size();
  report.n_b = b.size();
  report.projection_seed = rng.seed();
  report.projection_stream = rng.stream_id();
  for (Eigen::Index j = 0; j < d; ++j) {
    report.marginals.push_back(detail::compare_along(a, b, Vec::Unit(d, j)));
  }
  for (std::size_t k = 0; k < n_projections; ++k) {
    Vec u(d);
    do {
      for (Eigen::Index j = 0; j < d; ++j) {
        u[j] = rng.normal();
      }
    } while (u.norm() == 0.0);
    u.normalize();
    report.projections.push_back(detail::compare_along(a, b, u));
  }
  return report;
}

}  // namespace ratio_mc

#endif
