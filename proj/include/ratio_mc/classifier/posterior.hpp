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

#ifndef RATIO_MC_CLASSIFIER_POSTERIOR_HPP
#define RATIO_MC_CLASSIFIER_POSTERIOR_HPP

#include <ratio_mc/classifier/mlp.hpp>
#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

/**
 * \file
 * \brief Class-1 posterior evaluators x -> r(x) = P(k = 1 | x).
 *
 * Every evaluator reports its logit log(r / (1 - r)) directly, so odds and density ratios
 * never have to be recovered from a probability rounded near 0 or 1.
 */

namespace ratio_mc {

/// Default clamp: r is confined to [eps, 1 - eps] before any odds transform.
inline constexpr double kDefaultClampEps = 1e-7;

/// Type-erased, immutable, shareable posterior.
class PosteriorFn {
 public:
  using LogitFn = std::function<double(const Vec&)>;

  PosteriorFn(std::string name, LogitFn logit) : impl_{std::make_shared<Impl>(Impl{std::move(name), std::move(logit), nullptr})} {}

  /// Wraps a trained network; batch evaluation goes through matrix products.
  static PosteriorFn from_mlp(MlpClassifier model, std::string name = "mlp") {
    auto shared = std::make_shared<const MlpClassifier>(std::move(model));
    PosteriorFn fn{std::move(name), [shared](const Vec& x) { return shared->logit(x); }};
    fn.impl_->mlp = shared;
    return fn;
  }

  /// r(x) = r for every x. Requires r in (0, 1).
  static PosteriorFn constant(double r) {
    if (!(r > 0.0 && r < 1.0)) {
      throw InvalidArgument("constant posterior must lie in (0, 1)");
    }
    const double z = logit(r);
    return PosteriorFn{"constant", [z](const Vec&) { return z; }};
  }

  [[nodiscard]] const std::string& name() const noexcept { return impl_->name; }

  [[nodiscard]] double logit_at(const Vec& x) const { return impl_->logit(x); }

  [[nodiscard]] double operator()(const Vec& x) const { return sigmoid(logit_at(x)); }

  /// Logits of many points. Networks are evaluated in chunks, agreeing with `logit_at` up to rounding.
  [[nodiscard]] std::vector<double> logits(std::span<const Vec> points) const {
    std::vector<double> out(points.size());
    if (impl_->mlp && !points.empty()) {
      constexpr std::size_t kChunk = 4096;
      for (std::size_t start = 0; start < points.size(); start += kChunk) {
        const auto count = std::min(kChunk, points.size() - start);
        const auto z = impl_->mlp->logits(to_columns(points.subspan(start, count)));
        for (std::size_t i = 0; i < count; ++i) {
          out[start + i] = z[static_cast<Eigen::Index>(i)];
        }
      }
      return out;
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      out[i] = logit_at(points[i]);
    }
    return out;
  }

  /// The wrapped network, if this posterior came from `from_mlp`.
  [[nodiscard]] const MlpClassifier* mlp() const noexcept { return impl_->mlp.get(); }

 private:
  struct Impl {
    std::string name;
    LogitFn logit;
    std::shared_ptr<const MlpClassifier> mlp;
  };
  std::shared_ptr<Impl> impl_;
};

/// The exact posterior n1 p1(x) / (n1 p1(x) + n0 p0(x)) from closed-form densities.
inline PosteriorFn oracle_posterior(const Distribution& p1, const Distribution& p0, std::size_t n1, std::size_t n0) {
  if (!p1.has_density() || !p0.has_density()) {
    throw UnsupportedDensity("oracle_posterior: both distributions need a closed-form density");
  }
  if (p1.dim() != p0.dim()) {
    throw DimensionMismatch("oracle_posterior: dimensions differ");
  }
  if (n1 == 0 || n0 == 0) {
    throw InvalidArgument("oracle_posterior: class counts must be positive");
  }
  const double log_prior_odds = std::log(static_cast<double>(n1)) - std::log(static_cast<double>(n0));
  return PosteriorFn{"oracle", [p1, p0, log_prior_odds](const Vec& x) {
                       return log_prior_odds + (p1.log_pdf(x) - p0.log_pdf(x));
                     }};
}

/// Logit confined to [logit(eps), logit(1 - eps)]; the same as clamping r to [eps, 1 - eps].
inline double clamp_logit(double z, double eps = kDefaultClampEps) noexcept {
  const double bound = logit(1.0 - eps);
  return std::clamp(z, -bound, bound);
}

/// Binary cross-entropy sum over `ds`, evaluated on clamped probabilities.
inline double bce_loss(const PosteriorFn& posterior, const LabeledDataset& ds, double eps = kDefaultClampEps) {
  if (ds.empty()) {
    throw InvalidArgument("bce_loss: empty dataset");
  }
  const auto z = posterior.logits(ds.points());
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double zc = clamp_logit(z[i], eps);
    // -log r = softplus(-z), -log(1 - r) = softplus(z)
    loss += ds.labels()[i] == 1 ? softplus(-zc) : softplus(zc);
  }
  return loss;
}

/// Fraction of points classified correctly at threshold 1/2.
inline double accuracy(const PosteriorFn& posterior, const LabeledDataset& ds) {
  const auto z = posterior.logits(ds.points());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    hits += (z[i] > 0.0) == (ds.labels()[i] == 1) ? 1 : 0;
  }
  return ds.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(ds.size());
}

}  // namespace ratio_mc

#endif
