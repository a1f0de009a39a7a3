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

#ifndef RATIO_MC_SAMPLERS_SAMPLE_SET_HPP
#define RATIO_MC_SAMPLERS_SAMPLE_SET_HPP

#include <ratio_mc/core/linalg.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ratio_mc {

/// Provenance and bookkeeping attached to every sampler output.
struct SampleMeta {
  std::string sampler;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t n_proposed = 0;
  std::size_t n_accepted = 0;
  /// Final envelope constant (AR only).
  std::optional<double> c_final;
  /// Ratio evaluations where the posterior clamp fired.
  std::size_t clamp_events = 0;
  /// AR proposals whose ratio exceeded the envelope in force when they were tested.
  std::size_t cap_events = 0;
  bool budget_exhausted = false;
  bool degenerate_weights = false;
};

struct SampleSet {
  Points points;
  /// Normalized weights, present for weighted (pre-resampling) sets.
  std::optional<std::vector<double>> weights;
  SampleMeta meta;
};

struct ChainResult {
  /// States after burn-in, one per step.
  Points states;
  double acceptance_rate = 0.0;
  std::size_t burn_in = 0;
  SampleMeta meta;
};

}  // namespace ratio_mc

#endif
