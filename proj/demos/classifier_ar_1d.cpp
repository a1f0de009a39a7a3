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

// Trains a classifier to tell N(0, 1) from N(0, 4), turns it into a density ratio and
// draws target samples three ways from the wide instrumental.

#include <ratio_mc/ratio_mc.hpp>

#include <cmath>
#include <cstdio>

int main() {
  using namespace ratio_mc;  // NOLINT(google-build-using-namespace)

  const Distribution target = Gaussian::isotropic(Vec::Zero(1), 1.0);
  const Distribution instrumental = Gaussian::isotropic(Vec::Zero(1), 2.0);

  auto data_rng = create_rng(42, 0);
  const auto ds = build_dataset(target, instrumental, 5000, 5000, data_rng);

  TrainConfig cfg;
  cfg.seed = 42;
  cfg.epochs = 60;
  const auto trained = train(ds, cfg);
  std::printf("trained %zu epochs, best %zu, accuracy %.3f\n", trained.trace.train_loss.size(),
              trained.trace.best_epoch, accuracy(PosteriorFn::from_mlp(trained.model), ds));

  const RatioEstimator est{PosteriorFn::from_mlp(trained.model), ds.n0(), ds.n1()};
  std::printf("log ratio at 0: %.4f (exact %.4f)\n", est.log_ratio_hat(Vec::Zero(1)), std::log(2.0));

  const auto envelope = estimate_C(est, ds);
  auto rng = create_rng(42, 1);
  const auto ar = ar_sample(est, envelope, instrumental, 2000, std::nullopt, rng);
  std::printf("ar:  C=%.4f -> %.4f, acceptance %.3f, caps %zu\n", envelope.value(), *ar.meta.c_final,
              acceptance_rate(ar), ar.meta.cap_events);

  const auto chain = imh_chain(est, instrumental, 5000, 500, std::nullopt, rng);
  std::printf("imh: acceptance %.3f\n", chain.acceptance_rate);

  const auto sir = sir_sample(est, instrumental, 20000, 2000, ResamplingScheme::kSystematic, rng);
  std::printf("sir: ess %.0f of 20000\n", sir.ess);

  auto direct_rng = create_rng(42, 2);
  const auto direct = target.sample(2000, direct_rng);
  auto first = [](const Points& pts) {
    std::vector<double> v;
    for (const auto& p : pts) {
      v.push_back(p[0]);
    }
    return v;
  };
  std::printf("ks p-values vs direct draws: ar %.3f, imh %.3f, sir %.3f\n",
              ks_two_sample(first(ar.points), first(direct)).p_value,
              ks_two_sample(first(chain.states), first(direct)).p_value,
              ks_two_sample(first(sir.resampled.points), first(direct)).p_value);
  return 0;
}
