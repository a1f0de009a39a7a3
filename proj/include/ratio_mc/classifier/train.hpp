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

#ifndef RATIO_MC_CLASSIFIER_TRAIN_HPP
#define RATIO_MC_CLASSIFIER_TRAIN_HPP

#include <ratio_mc/classifier/mlp.hpp>
#include <ratio_mc/classifier/posterior.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <variant>
#include <vector>

namespace ratio_mc {

struct SgdConfig {};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::variant<AdamConfig, SgdConfig> optimizer = AdamConfig{};
  std::uint64_t seed = 0;
  std::size_t early_stop_patience = 20;
  /// Fraction of each class used for fitting; the rest drives early stopping.
  double train_fraction = 0.9;
  std::vector<std::size_t> hidden_layers{64, 64};
  Activation activation = Activation::kTanh;

  void validate() const {
    if (batch_size == 0) {
      throw InvalidArgument("train: batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidArgument("train: learning_rate must be finite and positive");
    }
    if (epochs == 0) {
      throw InvalidArgument("train: epochs must be >= 1");
    }
  }
};

/// Mean per-sample BCE after every epoch.
struct LossTrace {
  double initial_train_loss = 0.0;
  double initial_validation_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  /// 1-based epoch whose parameters were kept; 0 means the initialization.
  std::size_t best_epoch = 0;
};

struct TrainResult {
  MlpClassifier model;
  LossTrace trace;
};

namespace detail {

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, Eigen::Index n) : cfg_{cfg}, m_{Vec::Zero(n)}, v_{Vec::Zero(n)} {}

  void step(Vec& params, const Vec& grad) {
    if (const auto* adam = std::get_if<AdamConfig>(&cfg_.optimizer)) {
      ++t_;
      m_ = adam->beta1 * m_ + (1.0 - adam->beta1) * grad;
      v_ = adam->beta2 * v_ + (1.0 - adam->beta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(adam->beta1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(adam->beta2, static_cast<double>(t_));
      params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + adam->epsilon);
    } else {
      params -= cfg_.learning_rate * grad;
    }
  }

 private:
  const TrainConfig& cfg_;
  Vec m_;
  Vec v_;
  std::uint64_t t_ = 0;
};

inline double mean_loss(const MlpClassifier& model, const Mat& columns, std::span<const std::uint8_t> labels) {
  const auto z = model.logits(columns);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += labels[static_cast<std::size_t>(i)] == 1 ? softplus(-z[i]) : softplus(z[i]);
  }
  return loss / static_cast<double>(z.size());
}

}  // namespace detail

/// Minimizes the mean BCE with mini-batches and early stopping on a stratified validation split.
/**
 * Deterministic for a given (dataset, config): stream 0 of `cfg.seed` initializes the weights,
 * stream 1 draws the split and stream 2 orders the mini-batches. The returned model carries the
 * parameters of the epoch with the lowest validation loss, and a standardizer fit on the
 * training part.
 */
inline TrainResult train(const LabeledDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.n0() == 0 || ds.n1() == 0) {
    throw TooFewSamples("train: dataset must contain both classes");
  }
  auto init_rng = create_rng(cfg.seed, 0);
  auto split_rng = create_rng(cfg.seed, 1);
  auto batch_rng = create_rng(cfg.seed, 2);

  const auto split = stratified_split(ds, cfg.train_fraction, split_rng);
  std::vector<std::size_t> sizes{static_cast<std::size_t>(ds.dim())};
  sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
  sizes.push_back(1);
  MlpClassifier model{sizes, cfg.activation, init_rng};
  model.set_standardizer(Standardizer::fit(split.train.points()));

  const Mat train_x = to_columns(split.train.points());
  const Mat val_x = to_columns(split.validation.points());
  const auto& train_y = split.train.labels();
  const auto& val_y = split.validation.labels();

  TrainResult result{model, {}};
  result.trace.initial_train_loss = detail::mean_loss(model, train_x, train_y);
  result.trace.initial_validation_loss = detail::mean_loss(model, val_x, val_y);
  double best_val = result.trace.initial_validation_loss;

  Vec params = model.parameters();
  detail::Optimizer optimizer{cfg, params.size()};
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vec grad;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, batch_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto count = std::min(cfg.batch_size, order.size() - start);
      Mat batch_x(train_x.rows(), static_cast<Eigen::Index>(count));
      std::vector<std::uint8_t> batch_y(count);
      for (std::size_t i = 0; i < count; ++i) {
        batch_x.col(static_cast<Eigen::Index>(i)) = train_x.col(static_cast<Eigen::Index>(order[start + i]));
        batch_y[i] = train_y[order[start + i]];
      }
      model.loss_and_gradient(batch_x, batch_y, grad);
      grad /= static_cast<double>(count);
      optimizer.step(params, grad);
      model.set_parameters(params);
    }
    const double train_loss = detail::mean_loss(model, train_x, train_y);
    const double val_loss = detail::mean_loss(model, val_x, val_y);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss) || !params.allFinite()) {
      throw NonFiniteLoss(epoch, "train=" + std::to_string(train_loss) + " validation=" + std::to_string(val_loss));
    }
    result.trace.train_loss.push_back(train_loss);
    result.trace.validation_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.model = model;
      result.trace.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.early_stop_patience && cfg.early_stop_patience > 0) {
      break;
    }
  }
  return result;
}

}  // namespace ratio_mc

#endif
