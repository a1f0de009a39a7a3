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

#ifndef RATIO_MC_RATIO_MC_HPP
#define RATIO_MC_RATIO_MC_HPP

#include <ratio_mc/classifier/mlp.hpp>
#include <ratio_mc/classifier/posterior.hpp>
#include <ratio_mc/classifier/train.hpp>
#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/core/rng.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/diagnostics/ess.hpp>
#include <ratio_mc/diagnostics/kl_bce.hpp>
#include <ratio_mc/diagnostics/ks.hpp>
#include <ratio_mc/diagnostics/quadrature.hpp>
#include <ratio_mc/diagnostics/report.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/ratio.hpp>
#include <ratio_mc/samplers/acceptance_rejection.hpp>
#include <ratio_mc/samplers/importance.hpp>
#include <ratio_mc/samplers/independent_mh.hpp>
#include <ratio_mc/samplers/mixture_check.hpp>
#include <ratio_mc/samplers/sample_set.hpp>
#include <ratio_mc/samplers/sir.hpp>
#include <ratio_mc/version.hpp>

#endif
