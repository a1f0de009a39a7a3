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

#ifndef RATIO_MC_DISTRIBUTIONS_HPP
#define RATIO_MC_DISTRIBUTIONS_HPP

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

/**
 * \file
 * \brief Sampleable target and instrumental distributions.
 *
 * Gaussians and Gaussian mixtures have exact densities and serve as oracles. The two-moons
 * and rings families only sample; asking them for a density throws `UnsupportedDensity`.
 */

namespace ratio_mc {

/// Multivariate normal with a validated covariance.
class Gaussian {
 public:
  Gaussian(Vec mean, Mat covariance) : mean_{std::move(mean)}, covariance_{std::move(covariance)} {
    if (mean_.size() == 0 || covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
      throw DimensionMismatch("gaussian: mean and covariance dimensions disagree");
    }
    if (!mean_.allFinite()) {
      throw InvalidArgument("gaussian: non-finite mean");
    }
    auto lower = cholesky_lower(covariance_);
    if (!lower) {
      throw InvalidArgument("gaussian: covariance is not symmetric positive definite");
    }
    chol_ = std::move(*lower);
    const double log_det = 2.0 * chol_.diagonal().array().log().sum();
    log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) + log_det);
  }

  /// Isotropic helper: N(mean, sigma^2 I).
  static Gaussian isotropic(Vec mean, double sigma) {
    const auto d = mean.size();
    return Gaussian{std::move(mean), Mat::Identity(d, d) * (sigma * sigma)};
  }

  [[nodiscard]] const Vec& mean() const noexcept { return mean_; }
  [[nodiscard]] const Mat& covariance() const noexcept { return covariance_; }
  [[nodiscard]] const Mat& cholesky() const noexcept { return chol_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return mean_.size(); }

  [[nodiscard]] double log_pdf(const Vec& x) const {
    const Vec z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
    return log_norm_ - 0.5 * z.squaredNorm();
  }

  Vec sample(RngStream& rng) const {
    Vec z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z[i] = rng.normal();
    }
    return mean_ + chol_.triangularView<Eigen::Lower>() * z;
  }

 private:
  Vec mean_;
  Mat covariance_;
  Mat chol_;
  double log_norm_ = 0.0;
};

/// Finite mixture of Gaussians sharing one dimension.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<Gaussian> components)
      : weights_{std::move(weights)}, components_{std::move(components)} {
    if (weights_.empty() || weights_.size() != components_.size()) {
      throw InvalidArgument("gaussian_mixture: need one weight per component");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidArgument("gaussian_mixture: weights must be finite and nonnegative");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidArgument("gaussian_mixture: weights must sum to 1");
    }
    for (const auto& c : components_) {
      if (c.dim() != components_.front().dim()) {
        throw DimensionMismatch("gaussian_mixture: components differ in dimension");
      }
    }
    cumulative_.resize(weights_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
    log_weights_.reserve(weights_.size());
    for (double w : weights_) {
      log_weights_.push_back(std::log(w));
    }
  }

  /// `n_modes` isotropic components with equal weight, centered on a circle of the given radius.
  static GaussianMixture circle(std::size_t n_modes, double radius, double sigma) {
    std::vector<Gaussian> comps;
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_modes);
      comps.push_back(Gaussian::isotropic(Vec{{radius * std::cos(angle), radius * std::sin(angle)}}, sigma));
    }
    return GaussianMixture{std::vector<double>(n_modes, 1.0 / static_cast<double>(n_modes)), std::move(comps)};
  }

  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<Gaussian>& components() const noexcept { return components_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return components_.front().dim(); }

  [[nodiscard]] double log_pdf(const Vec& x) const {
    std::vector<double> terms(components_.size());
    for (std::size_t k = 0; k < components_.size(); ++k) {
      terms[k] = log_weights_[k] + components_[k].log_pdf(x);
    }
    return log_sum_exp(terms);
  }

  Vec sample(RngStream& rng) const {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cumulative_.size() && !(u < cumulative_[k])) {
      ++k;
    }
    // Skip zero-weight tails left by rounding in the cumulative sum.
    while (weights_[k] == 0.0 && k > 0) {
      --k;
    }
    return components_[k].sample(rng);
  }

 private:
  std::vector<double> weights_;
  std::vector<Gaussian> components_;
  std::vector<double> cumulative_;
  std::vector<double> log_weights_;
};

/// Two interleaved half circles in 2D, centered near the origin, with isotropic noise.
struct TwoMoons {
  double noise_scale = 0.1;

  Vec sample(RngStream& rng) const {
    const bool upper = rng.uniform_index(2) == 0;
    const double t = std::numbers::pi * rng.uniform();
    Vec x(2);
    if (upper) {
      x << std::cos(t) - 0.5, std::sin(t) - 0.25;
    } else {
      x << 0.5 - std::cos(t), 0.25 - std::sin(t);
    }
    x[0] += noise_scale * rng.normal();
    x[1] += noise_scale * rng.normal();
    return x;
  }
};

/// Concentric rings in 2D; each ring is picked with equal probability.
struct Rings {
  std::vector<double> radii{1.0, 2.0};
  double noise_scale = 0.1;

  Vec sample(RngStream& rng) const {
    const double radius = radii[static_cast<std::size_t>(rng.uniform_index(radii.size()))];
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    Vec x(2);
    x << radius * std::cos(angle) + noise_scale * rng.normal(), radius * std::sin(angle) + noise_scale * rng.normal();
    return x;
  }
};

/// Immutable, sampleable distribution over R^d.
class Distribution {
 public:
  using Kind = std::variant<Gaussian, GaussianMixture, TwoMoons, Rings>;

  Distribution(Gaussian g) : kind_{std::move(g)} {}  // NOLINT(google-explicit-constructor)
  Distribution(GaussianMixture m) : kind_{std::move(m)} {}  // NOLINT(google-explicit-constructor)
  Distribution(TwoMoons t) : kind_{t} { check_noise(t.noise_scale); }  // NOLINT(google-explicit-constructor)
  Distribution(Rings r) : kind_{std::move(r)} {  // NOLINT(google-explicit-constructor)
    const auto& rings = std::get<Rings>(kind_);
    check_noise(rings.noise_scale);
    if (rings.radii.empty()) {
      throw InvalidArgument("rings: need at least one radius");
    }
  }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  [[nodiscard]] std::string kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Gaussian>) {
            return "gaussian";
          } else if constexpr (std::is_same_v<T, GaussianMixture>) {
            return "gaussian_mixture";
          } else if constexpr (std::is_same_v<T, TwoMoons>) {
            return "two_moons";
          } else {
            return "rings";
          }
        },
        kind_);
  }

  [[nodiscard]] Eigen::Index dim() const {
    return std::visit(
        [](const auto& k) -> Eigen::Index {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, TwoMoons> || std::is_same_v<T, Rings>) {
            return 2;
          } else {
            return k.dim();
          }
        },
        kind_);
  }

  [[nodiscard]] bool has_density() const noexcept {
    return std::holds_alternative<Gaussian>(kind_) || std::holds_alternative<GaussianMixture>(kind_);
  }

  /// Exact log density. Throws `UnsupportedDensity` for sample-only kinds.
  [[nodiscard]] double log_pdf(const Vec& x) const {
    if (x.size() != dim()) {
      throw DimensionMismatch("log_pdf: point dimension does not match distribution");
    }
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, GaussianMixture>) {
            return k.log_pdf(x);
          } else {
            throw UnsupportedDensity(kind_name() + " has no closed-form density");
          }
        },
        kind_);
  }

  Vec sample_one(RngStream& rng) const {
    return std::visit([&](const auto& k) { return k.sample(rng); }, kind_);
  }

  Points sample(std::size_t n, RngStream& rng) const {
    Points out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(sample_one(rng));
    }
    return out;
  }

 private:
  static void check_noise(double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("noise_scale must be finite and nonnegative");
    }
  }

  Kind kind_;
};

/// Relative ridge added to the diagonal of a moment-fit covariance.
inline constexpr double kMomentFitRidge = 1e-6;

/// Gaussian with the sample mean and (unbiased) sample covariance of `points`.
/**
 * A ridge of `kMomentFitRidge * trace / d` is added to the diagonal. When every point is
 * identical the trace vanishes and the ridge falls back to `kMomentFitRidge` itself.
 */
inline Gaussian fit_gaussian_moments(std::span<const Vec> points) {
  if (points.empty()) {
    throw DegenerateData("fit_gaussian_moments: no points");
  }
  const auto d = points.front().size();
  if (static_cast<Eigen::Index>(points.size()) < d + 1) {
    throw DegenerateData("fit_gaussian_moments: need at least d + 1 points");
  }
  Vec mean = Vec::Zero(d);
  for (const auto& p : points) {
    if (p.size() != d) {
      throw DimensionMismatch("fit_gaussian_moments: ragged points");
    }
    mean += p;
  }
  mean /= static_cast<double>(points.size());
  Mat cov = Mat::Zero(d, d);
  for (const auto& p : points) {
    const Vec c = p - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(points.size() - 1);
  cov = 0.5 * (cov + cov.transpose());
  const double trace = cov.trace();
  const double ridge = trace > 0.0 ? kMomentFitRidge * trace / static_cast<double>(d) : kMomentFitRidge;
  cov.diagonal().array() += ridge;
  if (!cholesky_lower(cov)) {
    throw DegenerateData("fit_gaussian_moments: covariance not positive definite after ridge");
  }
  return Gaussian{std::move(mean), std::move(cov)};
}

}  // namespace ratio_mc

#endif
