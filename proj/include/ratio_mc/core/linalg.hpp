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

#ifndef RATIO_MC_CORE_LINALG_HPP
#define RATIO_MC_CORE_LINALG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ratio_mc {

/// A point in R^d.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Points stored one per element; all share the same dimension.
using Points = std::vector<Vec>;

inline bool all_finite(const Vec& x) { return x.allFinite(); }

/// Lower Cholesky factor of a symmetric matrix, or nullopt if it is not positive definite.
inline std::optional<Mat> cholesky_lower(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    return std::nullopt;
  }
  if (!m.isApprox(m.transpose(), 1e-12) || !m.allFinite()) {
    return std::nullopt;
  }
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    return std::nullopt;
  }
  Mat lower = llt.matrixL();
  if ((lower.diagonal().array() <= 0.0).any()) {
    return std::nullopt;
  }
  return lower;
}

/// log(sum(exp(values))) without overflow; -inf for an empty input.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) {
    return top;
  }
  double acc = 0.0;
  for (double v : values) {
    acc += std::exp(v - top);
  }
  return top + std::log(acc);
}

/// log(1 + exp(z)), accurate for large |z|.
inline double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double r) noexcept { return std::log(r) - std::log1p(-r); }

/// Points as the columns of a d x n matrix.
inline Mat to_columns(std::span<const Vec> points) {
  if (points.empty()) {
    return Mat{};
  }
  Mat out(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return out;
}

}  // namespace ratio_mc

#endif
