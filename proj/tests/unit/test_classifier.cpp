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

#include <gtest/gtest.h>

#include <ratio_mc/classifier/mlp.hpp>
#include <ratio_mc/classifier/posterior.hpp>
#include <ratio_mc/classifier/train.hpp>
#include <ratio_mc/io/json_io.hpp>

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

namespace {

using ratio_mc::Activation;
using ratio_mc::Distribution;
using ratio_mc::Gaussian;
using ratio_mc::LabeledDataset;
using ratio_mc::MlpClassifier;
using ratio_mc::PosteriorFn;
using ratio_mc::Vec;
using ratio_mc::create_rng;

Distribution normal_1d(double mean, double sigma) { return Gaussian::isotropic(Vec::Constant(1, mean), sigma); }

MlpClassifier zero_head(std::vector<std::size_t> sizes, Activation act, std::uint64_t seed) {
  auto rng = create_rng(seed, 0);
  MlpClassifier m{std::move(sizes), act, rng};
  m.layers().back().weights.setZero();
  m.layers().back().bias.setZero();
  return m;
}

LabeledDataset random_batch(Eigen::Index d, std::size_t n, std::uint64_t seed) {
  auto rng = create_rng(seed, 5);
  LabeledDataset ds{d};
  for (std::size_t i = 0; i < n; ++i) {
    Vec x(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      x[j] = 2.0 * rng.normal();
    }
    ds.push_back(std::move(x), static_cast<std::uint8_t>(rng.uniform_index(2)));
  }
  return ds;
}

double max_relative_gradient_error(MlpClassifier model, const LabeledDataset& batch) {
  const auto columns = ratio_mc::to_columns(batch.points());
  Vec analytic;
  model.loss_and_gradient(columns, batch.labels(), analytic);
  Vec params = model.parameters();
  Vec scratch;
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    model.set_parameters(params);
    const double up = model.loss_and_gradient(columns, batch.labels(), scratch);
    params[i] = saved - h;
    model.set_parameters(params);
    const double down = model.loss_and_gradient(columns, batch.labels(), scratch);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

TEST(Forward, ZeroHeadGivesOneHalf) {
  const auto m = zero_head({3, 16, 8, 1}, Activation::kTanh, 1);
  auto rng = create_rng(2, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec x = Vec::NullaryExpr(3, [&] { return 10.0 * rng.normal(); });
    ASSERT_EQ(m.forward(x), 0.5);
  }
}

TEST(Forward, Deterministic) {
  auto rng = create_rng(3, 0);
  const MlpClassifier m{{2, 8, 1}, Activation::kRelu, rng};
  const Vec x{{0.3, -1.2}};
  EXPECT_EQ(m.forward(x), m.forward(x));
  auto again = create_rng(3, 0);
  const MlpClassifier twin{{2, 8, 1}, Activation::kRelu, again};
  EXPECT_EQ(m.parameters(), twin.parameters());
}

TEST(Forward, OutputStaysInsideUnitInterval) {
  auto rng = create_rng(4, 0);
  const MlpClassifier m{{2, 32, 32, 1}, Activation::kTanh, rng};
  for (int i = 0; i < 1000; ++i) {
    const Vec x = Vec::NullaryExpr(2, [&] { return 100.0 * rng.normal(); });
    const double r = m.forward(x);
    ASSERT_GT(r, 0.0);
    ASSERT_LT(r, 1.0);
  }
}

TEST(Forward, BatchedLogitsMatchSingle) {
  auto rng = create_rng(5, 0);
  const MlpClassifier m{{2, 8, 8, 1}, Activation::kTanh, rng};
  const auto batch = random_batch(2, 50, 6);
  const auto z = m.logits(ratio_mc::to_columns(batch.points()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_NEAR(z[static_cast<Eigen::Index>(i)], m.logit(batch.points()[i]), 1e-12);
  }
}

TEST(Parameters, FlatRoundTrip) {
  auto rng = create_rng(7, 0);
  MlpClassifier m{{2, 5, 3, 1}, Activation::kTanh, rng};
  EXPECT_EQ(m.num_parameters(), static_cast<std::size_t>(2 * 5 + 5 + 5 * 3 + 3 + 3 + 1));
  Vec p = m.parameters();
  // Row-major weights first, then the bias.
  EXPECT_EQ(p[1], m.layers()[0].weights(0, 1));
  EXPECT_EQ(p[2], m.layers()[0].weights(1, 0));
  p.setLinSpaced(-1.0, 1.0);
  m.set_parameters(p);
  EXPECT_EQ(m.parameters(), p);
}

TEST(Parameters, GlorotBounds) {
  auto rng = create_rng(8, 0);
  const MlpClassifier m{{4, 64, 64, 1}, Activation::kTanh, rng};
  const double limit = std::sqrt(6.0 / 128.0);
  EXPECT_LE(m.layers()[1].weights.cwiseAbs().maxCoeff(), limit);
  EXPECT_GT(m.layers()[1].weights.cwiseAbs().maxCoeff(), 0.9 * limit);
  EXPECT_EQ(m.layers()[1].bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradient, MatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto rng = create_rng(100 + seed, 0);
    MlpClassifier m{{2, 6, 5, 1}, Activation::kTanh, rng};
    Vec p = m.parameters();
    // Nonzero biases, so every parameter has a nontrivial gradient.
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p[i] += 0.3 * rng.normal();
    }
    m.set_parameters(p);
    m.set_standardizer({Vec{{0.5, -0.2}}, Vec{{1.5, 0.7}}});
    EXPECT_LT(max_relative_gradient_error(m, random_batch(2, 32, seed)), 1e-4) << "seed " << seed;
  }
}

TEST(Gradient, LogisticRegressionMatchesCentralDifferences) {
  auto rng = create_rng(9, 0);
  auto m = ratio_mc::make_logistic_regression(3, rng);
  EXPECT_EQ(m.num_parameters(), 4U);
  EXPECT_LT(max_relative_gradient_error(m, random_batch(3, 40, 10)), 1e-4);
}

TEST(Gradient, SymmetricBatchHasZeroBiasGradient) {
  const auto m = zero_head({2, 8, 1}, Activation::kTanh, 11);
  auto rng = create_rng(12, 0);
  LabeledDataset batch{2};
  for (int i = 0; i < 20; ++i) {
    const Vec x{{rng.normal(), rng.normal()}};
    batch.push_back(x, 1);
    batch.push_back(-x, 0);
  }
  const Vec g = ratio_mc::grad_bce(m, batch);
  EXPECT_EQ(g[g.size() - 1], 0.0);
}

TEST(Gradient, SingleSampleLogitDerivative) {
  const auto m = zero_head({1, 4, 1}, Activation::kTanh, 13);
  LabeledDataset batch{1};
  batch.push_back(Vec::Constant(1, 0.7), 1);
  const Vec g = ratio_mc::grad_bce(m, batch);
  // Final bias enters the logit with unit weight.
  EXPECT_EQ(g[g.size() - 1], -0.5);
}

TEST(Posterior, ConstantHalfLossIsNLog2) {
  const auto ds = random_batch(2, 321, 14);
  EXPECT_NEAR(ratio_mc::bce_loss(PosteriorFn::constant(0.5), ds), 321.0 * std::log(2.0), 1e-10);
}

TEST(Posterior, SeparableLimitApproachesClampFloor) {
  LabeledDataset ds{1};
  for (int i = 0; i < 10; ++i) {
    ds.push_back(Vec::Constant(1, 1.0 + i), 1);
    ds.push_back(Vec::Constant(1, -1.0 - i), 0);
  }
  const PosteriorFn steep{"steep", [](const Vec& x) { return 1e6 * x[0]; }};
  const double loss = ratio_mc::bce_loss(steep, ds);
  EXPECT_NEAR(loss, 20.0 * -std::log1p(-1e-7), 1e-12);
  EXPECT_LT(loss, 1e-5);
}

TEST(Posterior, OracleExamples) {
  const auto same = ratio_mc::oracle_posterior(normal_1d(0, 1), normal_1d(0, 1), 50, 50);
  const auto pair = ratio_mc::oracle_posterior(normal_1d(0, 1), normal_1d(0, 2), 50, 50);
  const auto prior = ratio_mc::oracle_posterior(normal_1d(0, 1), normal_1d(0, 1), 300, 100);
  for (double x : {-2.0, 0.0, 1.5}) {
    EXPECT_NEAR(same(Vec::Constant(1, x)), 0.5, 1e-15);
    EXPECT_NEAR(prior(Vec::Constant(1, x)), 0.75, 1e-15);
  }
  EXPECT_NEAR(pair(Vec::Zero(1)), 2.0 / 3.0, 1e-15);
}

TEST(Posterior, OracleNeedsDensities) {
  const Distribution moons = ratio_mc::TwoMoons{0.1};
  const Distribution g = Gaussian::isotropic(Vec::Zero(2), 1.0);
  EXPECT_THROW((void)ratio_mc::oracle_posterior(moons, g, 1, 1), ratio_mc::UnsupportedDensity);
}

TEST(Posterior, OracleLossMatchesBayesCrossEntropy) {
  auto rng = create_rng(15, 0);
  const auto ds = ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 10000, 10000, rng);
  const auto r = ratio_mc::oracle_posterior(normal_1d(0, 1), normal_1d(0, 2), 10000, 10000);
  EXPECT_NEAR(ratio_mc::bce_loss(r, ds) / 20000.0, ratio_mc::testing::kBayesCrossEntropy, 0.01);
}

// Expected BCE under the balanced mixture for a posterior given pointwise.
double expected_bce(const std::function<double(double)>& r) {
  using ratio_mc::testing::normal_pdf;
  return ratio_mc::testing::simpson(
      [&](double x) {
        const double v = r(x);
        return 0.5 * normal_pdf(x, 0, 1) * -std::log(v) + 0.5 * normal_pdf(x, 0, 2) * -std::log1p(-v);
      },
      -30.0, 30.0, 20000);
}

TEST(Posterior, OracleIsOptimalAgainstPerturbations) {
  const auto star = ratio_mc::oracle_posterior(normal_1d(0, 1), normal_1d(0, 2), 1, 1);
  auto at = [&](double x) { return star(Vec::Constant(1, x)); };
  const double best = expected_bce(at);
  EXPECT_NEAR(best, ratio_mc::testing::kBayesCrossEntropy, 1e-9);
  for (double delta : {-0.1, -0.05, 0.05, 0.1}) {
    const double perturbed = expected_bce([&](double x) { return std::clamp(at(x) + delta, 1e-7, 1.0 - 1e-7); });
    EXPECT_LE(best, perturbed) << "delta " << delta;
  }
}

TEST(Train, SeparableClusters) {
  const Distribution left = Gaussian::isotropic(Vec{{-5.0, 0.0}}, 1.0);
  const Distribution right = Gaussian::isotropic(Vec{{5.0, 0.0}}, 1.0);
  auto rng = create_rng(16, 0);
  const auto ds = ratio_mc::build_dataset(right, left, 500, 500, rng);
  ratio_mc::TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 17;
  const auto result = ratio_mc::train(ds, cfg);
  auto held_rng = create_rng(18, 0);
  const auto held = ratio_mc::build_dataset(right, left, 1000, 1000, held_rng);
  EXPECT_GE(ratio_mc::accuracy(PosteriorFn::from_mlp(result.model), ds), 0.99);
  EXPECT_GE(ratio_mc::accuracy(PosteriorFn::from_mlp(result.model), held), 0.99);
}

TEST(Train, DeterministicForSeed) {
  auto rng = create_rng(19, 0);
  const auto ds = ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 300, 300, rng);
  ratio_mc::TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 20;
  cfg.hidden_layers = {8};
  const auto a = ratio_mc::train(ds, cfg);
  const auto b = ratio_mc::train(ds, cfg);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(a.trace.validation_loss, b.trace.validation_loss);
  cfg.seed = 21;
  EXPECT_NE(ratio_mc::train(ds, cfg).model.parameters(), a.model.parameters());
}

TEST(Train, RejectsBadConfigAndData) {
  auto rng = create_rng(22, 0);
  const auto ds = ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 30, 30, rng);
  ratio_mc::TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW((void)ratio_mc::train(ds, cfg), ratio_mc::InvalidArgument);
  cfg = {};
  cfg.learning_rate = std::nan("");
  EXPECT_THROW((void)ratio_mc::train(ds, cfg), ratio_mc::InvalidArgument);
  EXPECT_THROW((void)ratio_mc::train(LabeledDataset{1}, ratio_mc::TrainConfig{}), ratio_mc::TooFewSamples);
}

TEST(Train, DivergenceIsReported) {
  auto rng = create_rng(23, 0);
  const auto ds = ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 200, 200, rng);
  ratio_mc::TrainConfig cfg;
  cfg.optimizer = ratio_mc::SgdConfig{};
  cfg.learning_rate = 1e308;
  cfg.epochs = 10;
  EXPECT_THROW((void)ratio_mc::train(ds, cfg), ratio_mc::NonFiniteLoss);
}

TEST(Train, SgdAlsoImproves) {
  auto rng = create_rng(24, 0);
  const auto ds = ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 1000, 1000, rng);
  ratio_mc::TrainConfig cfg;
  cfg.optimizer = ratio_mc::SgdConfig{};
  cfg.learning_rate = 0.05;
  cfg.epochs = 20;
  cfg.hidden_layers = {16};
  const auto result = ratio_mc::train(ds, cfg);
  ASSERT_GT(result.trace.best_epoch, 0U);
  EXPECT_LT(result.trace.validation_loss[result.trace.best_epoch - 1], result.trace.initial_validation_loss);
}

class GaussianPairTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto rng = create_rng(25, 0);
    dataset_ = new LabeledDataset(ratio_mc::build_dataset(normal_1d(0, 1), normal_1d(0, 2), 10000, 10000, rng));
    ratio_mc::TrainConfig cfg;
    cfg.seed = 26;
    result_ = new ratio_mc::TrainResult(ratio_mc::train(*dataset_, cfg));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete dataset_;
  }
  static LabeledDataset* dataset_;
  static ratio_mc::TrainResult* result_;
};

LabeledDataset* GaussianPairTraining::dataset_ = nullptr;
ratio_mc::TrainResult* GaussianPairTraining::result_ = nullptr;

TEST_F(GaussianPairTraining, ValidationLossNearBayesCrossEntropy) {
  const auto& t = result_->trace;
  ASSERT_GT(t.best_epoch, 0U);
  EXPECT_NEAR(t.validation_loss[t.best_epoch - 1], ratio_mc::testing::kBayesCrossEntropy, 0.02);
}

TEST_F(GaussianPairTraining, ForwardAtModeFavorsTarget) {
  const double r0 = result_->model.forward(Vec::Zero(1));
  EXPECT_GT(r0, 0.5);
  EXPECT_LT(r0, 1.0);
}

TEST_F(GaussianPairTraining, ReturnedParametersImproveOnInit) {
  const auto& t = result_->trace;
  ASSERT_GT(t.best_epoch, 0U);
  EXPECT_LE(t.train_loss[t.best_epoch - 1], t.initial_train_loss);
  EXPECT_LE(t.validation_loss[t.best_epoch - 1], t.initial_validation_loss);
  EXPECT_EQ(t.train_loss.size(), t.validation_loss.size());
  EXPECT_EQ(*std::min_element(t.validation_loss.begin(), t.validation_loss.end()), t.validation_loss[t.best_epoch - 1]);
}

TEST_F(GaussianPairTraining, ModelJsonRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "ratio_mc_model_roundtrip.json";
  ratio_mc::io::save_model(result_->model, path);
  const auto back = ratio_mc::io::load_model(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.parameters(), result_->model.parameters());
  EXPECT_EQ(back.standardizer().mean, result_->model.standardizer().mean);
  EXPECT_EQ(back.standardizer().scale, result_->model.standardizer().scale);
  EXPECT_EQ(back.layer_sizes(), result_->model.layer_sizes());
  EXPECT_EQ(back.activation(), result_->model.activation());
  for (double x : {-3.0, -0.1, 0.0, 2.5}) {
    EXPECT_EQ(back.logit(Vec::Constant(1, x)), result_->model.logit(Vec::Constant(1, x)));
  }
}

TEST(ModelJson, RejectsWrongFormat) {
  nlohmann::json j = {{"format", "something-else"}, {"format_version", 1}};
  EXPECT_THROW((void)ratio_mc::io::model_from_json(j), ratio_mc::ParseError);
}

}  // namespace
