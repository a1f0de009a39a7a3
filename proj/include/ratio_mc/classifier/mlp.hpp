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

#ifndef RATIO_MC_CLASSIFIER_MLP_HPP
#define RATIO_MC_CLASSIFIER_MLP_HPP

#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/errors.hpp>

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/**
 * \file
 * \brief Feed-forward binary classifier with a sigmoid output and analytic BCE gradients.
 *
 * The network maps a standardized input through hidden layers to a single logit z; the
 * posterior is sigmoid(z). With no hidden layers it is plain logistic regression.
 */

namespace ratio_mc {

enum class Activation { kTanh, kRelu };

inline std::string_view to_string(Activation a) noexcept { return a == Activation::kTanh ? "tanh" : "relu"; }

inline Activation activation_from_string(std::string_view name) {
  if (name == "tanh") {
    return Activation::kTanh;
  }
  if (name == "relu") {
    return Activation::kRelu;
  }
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

/// Per-dimension affine input map x -> (x - mean) / scale, frozen at training time.
struct Standardizer {
  Vec mean;
  Vec scale;

  static Standardizer identity(Eigen::Index d) { return {Vec::Zero(d), Vec::Ones(d)}; }

  /// Mean and (population) standard deviation of `points`; zero spreads map to scale 1.
  static Standardizer fit(std::span<const Vec> points) {
    const auto d = points.front().size();
    Standardizer s{Vec::Zero(d), Vec::Zero(d)};
    for (const auto& p : points) {
      s.mean += p;
    }
    s.mean /= static_cast<double>(points.size());
    for (const auto& p : points) {
      s.scale.array() += (p - s.mean).array().square();
    }
    s.scale = (s.scale / static_cast<double>(points.size())).cwiseSqrt();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(s.scale[j] > 0.0)) {
        s.scale[j] = 1.0;
      }
    }
    return s;
  }

  [[nodiscard]] Mat apply(const Mat& columns) const {
    return (columns.colwise() - mean).array().colwise() / scale.array();
  }
};

struct DenseLayer {
  Mat weights;  // out x in
  Vec bias;     // out
};

class MlpClassifier {
 public:
  MlpClassifier() = default;

  /// Parameters are Glorot-uniform, biases zero.
  MlpClassifier(std::vector<std::size_t> layer_sizes, Activation activation, RngStream& rng)
      : layer_sizes_{std::move(layer_sizes)}, activation_{activation} {
    if (layer_sizes_.size() < 2 || layer_sizes_.back() != 1 || layer_sizes_.front() == 0) {
      throw InvalidArgument("mlp: layer sizes must run from d >= 1 down to a single output");
    }
    standardizer_ = Standardizer::identity(static_cast<Eigen::Index>(layer_sizes_.front()));
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
      const auto fan_in = static_cast<Eigen::Index>(layer_sizes_[l]);
      const auto fan_out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
      if (fan_out == 0) {
        throw InvalidArgument("mlp: empty hidden layer");
      }
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      DenseLayer layer{Mat(fan_out, fan_in), Vec::Zero(fan_out)};
      for (Eigen::Index i = 0; i < fan_out; ++i) {
        for (Eigen::Index j = 0; j < fan_in; ++j) {
          layer.weights(i, j) = limit * (2.0 * rng.uniform() - 1.0);
        }
      }
      layers_.push_back(std::move(layer));
    }
  }

  /// Builds a model from explicit parameters (used by deserialization).
  MlpClassifier(Activation activation, Standardizer standardizer, std::vector<DenseLayer> layers)
      : activation_{activation}, standardizer_{std::move(standardizer)}, layers_{std::move(layers)} {
    if (layers_.empty()) {
      throw InvalidArgument("mlp: no layers");
    }
    layer_sizes_.push_back(static_cast<std::size_t>(layers_.front().weights.cols()));
    for (const auto& layer : layers_) {
      if (layer.weights.cols() != static_cast<Eigen::Index>(layer_sizes_.back()) ||
          layer.bias.size() != layer.weights.rows()) {
        throw DimensionMismatch("mlp: inconsistent layer shapes");
      }
      layer_sizes_.push_back(static_cast<std::size_t>(layer.weights.rows()));
    }
    if (layer_sizes_.back() != 1) {
      throw DimensionMismatch("mlp: output layer must have width 1");
    }
    if (standardizer_.mean.size() != static_cast<Eigen::Index>(layer_sizes_.front()) ||
        standardizer_.scale.size() != standardizer_.mean.size()) {
      throw DimensionMismatch("mlp: standardizer dimension");
    }
  }

  [[nodiscard]] const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
  [[nodiscard]] Activation activation() const noexcept { return activation_; }
  [[nodiscard]] const Standardizer& standardizer() const noexcept { return standardizer_; }
  [[nodiscard]] const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  [[nodiscard]] std::vector<DenseLayer>& layers() noexcept { return layers_; }
  [[nodiscard]] Eigen::Index input_dim() const noexcept { return static_cast<Eigen::Index>(layer_sizes_.front()); }

  void set_standardizer(Standardizer s) {
    if (s.mean.size() != input_dim()) {
      throw DimensionMismatch("mlp: standardizer dimension");
    }
    standardizer_ = std::move(s);
  }

  /// Pre-sigmoid outputs for the columns of `columns` (d x n).
  [[nodiscard]] Eigen::RowVectorXd logits(const Mat& columns) const {
    Mat h = standardizer_.apply(columns);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Mat a = layers_[l].weights * h;
      a.colwise() += layers_[l].bias;
      h = (l + 1 < layers_.size()) ? activate(a) : std::move(a);
    }
    return h.row(0);
  }

  [[nodiscard]] double logit(const Vec& x) const {
    Vec h = (x - standardizer_.mean).cwiseQuotient(standardizer_.scale);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Vec a = layers_[l].weights * h + layers_[l].bias;
      h = (l + 1 < layers_.size()) ? Vec(activate(a)) : std::move(a);
    }
    return h[0];
  }

  /// r(x) in (0, 1).
  [[nodiscard]] double forward(const Vec& x) const { return sigmoid(logit(x)); }

  [[nodiscard]] std::size_t num_parameters() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) {
      n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    }
    return n;
  }

  /// All parameters, layer by layer: weights in row-major order, then biases.
  [[nodiscard]] Vec parameters() const {
    Vec flat(static_cast<Eigen::Index>(num_parameters()));
    Eigen::Index k = 0;
    for (const auto& layer : layers_) {
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
          flat[k++] = layer.weights(i, j);
        }
      }
      flat.segment(k, layer.bias.size()) = layer.bias;
      k += layer.bias.size();
    }
    return flat;
  }

  void set_parameters(const Vec& flat) {
    if (flat.size() != static_cast<Eigen::Index>(num_parameters())) {
      throw DimensionMismatch("mlp: parameter vector length");
    }
    Eigen::Index k = 0;
    for (auto& layer : layers_) {
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
          layer.weights(i, j) = flat[k++];
        }
      }
      layer.bias = flat.segment(k, layer.bias.size());
      k += layer.bias.size();
    }
  }

  /// Summed BCE over the columns of `columns` and its gradient in `parameters()` layout.
  /**
   * The loss is sum_i softplus(-z_i) for label 1 and softplus(z_i) for label 0, i.e. the
   * unclamped BCE written in terms of logits. dL/dz_i = sigmoid(z_i) - k_i.
   */
  double loss_and_gradient(const Mat& columns, std::span<const std::uint8_t> labels, Vec& gradient) const {
    const auto n = columns.cols();
    std::vector<Mat> activations;
    activations.reserve(layers_.size() + 1);
    activations.push_back(standardizer_.apply(columns));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Mat a = layers_[l].weights * activations.back();
      a.colwise() += layers_[l].bias;
      activations.push_back((l + 1 < layers_.size()) ? activate(a) : std::move(a));
    }
    const auto& z = activations.back();
    double loss = 0.0;
    Mat delta(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k = labels[static_cast<std::size_t>(i)];
      loss += k == 1.0 ? softplus(-z(0, i)) : softplus(z(0, i));
      delta(0, i) = sigmoid(z(0, i)) - k;
    }

    gradient.resize(static_cast<Eigen::Index>(num_parameters()));
    std::vector<Eigen::Index> offsets;
    Eigen::Index k = 0;
    for (const auto& layer : layers_) {
      offsets.push_back(k);
      k += layer.weights.size() + layer.bias.size();
    }
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Mat grad_w = delta * activations[l].transpose();
      const Vec grad_b = delta.rowwise().sum();
      Eigen::Index off = offsets[l];
      for (Eigen::Index i = 0; i < grad_w.rows(); ++i) {
        for (Eigen::Index j = 0; j < grad_w.cols(); ++j) {
          gradient[off++] = grad_w(i, j);
        }
      }
      gradient.segment(off, grad_b.size()) = grad_b;
      if (l > 0) {
        Mat back = layers_[l].weights.transpose() * delta;
        delta = back.cwiseProduct(activation_derivative(activations[l]));
      }
    }
    return loss;
  }

 private:
  [[nodiscard]] Mat activate(const Mat& a) const {
    return activation_ == Activation::kTanh ? Mat(a.array().tanh()) : Mat(a.cwiseMax(0.0));
  }

  // In terms of the activation output h.
  [[nodiscard]] Mat activation_derivative(const Mat& h) const {
    if (activation_ == Activation::kTanh) {
      return (1.0 - h.array().square()).matrix();
    }
    return (h.array() > 0.0).cast<double>().matrix();
  }

  std::vector<std::size_t> layer_sizes_;
  Activation activation_ = Activation::kTanh;
  Standardizer standardizer_;
  std::vector<DenseLayer> layers_;
};

/// Logistic-regression baseline: an MLP without hidden layers.
inline MlpClassifier make_logistic_regression(std::size_t dim, RngStream& rng) {
  return MlpClassifier{{dim, 1}, Activation::kTanh, rng};
}

/// Gradient of the summed BCE of `clf` over `batch`, in `MlpClassifier::parameters()` layout.
inline Vec grad_bce(const MlpClassifier& clf, const LabeledDataset& batch) {
  if (batch.empty()) {
    throw InvalidArgument("grad_bce: empty batch");
  }
  Vec g;
  clf.loss_and_gradient(to_columns(batch.points()), batch.labels(), g);
  return g;
}

}  // namespace ratio_mc

#endif
