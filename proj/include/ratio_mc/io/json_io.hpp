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

#ifndef RATIO_MC_IO_JSON_IO_HPP
#define RATIO_MC_IO_JSON_IO_HPP

#include <ratio_mc/classifier/mlp.hpp>
#include <ratio_mc/classifier/train.hpp>
#include <ratio_mc/core/linalg.hpp>
#include <ratio_mc/dataset.hpp>
#include <ratio_mc/diagnostics/report.hpp>
#include <ratio_mc/distributions.hpp>
#include <ratio_mc/errors.hpp>
#include <ratio_mc/samplers/sample_set.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

/**
 * \file
 * \brief JSON and CSV (de)serialization for distributions, models, configs and results.
 *
 * Doubles are written in a round-trip-exact decimal form, so a save/load cycle restores every
 * bit. Schema violations surface as `ConfigError` (configs, distributions) or `ParseError`
 * (model files).
 */

namespace ratio_mc::io {

using nlohmann::json;

inline json to_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(to_json(Vec(m.row(i).transpose())));
  }
  return rows;
}

inline Vec vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Mat mat_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) {
    return Mat{};
  }
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ConfigError("matrix rows differ in length");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

// Distributions ------------------------------------------------------------------------------

inline json gaussian_to_json(const Gaussian& g) {
  return {{"kind", "gaussian"}, {"mean", to_json(g.mean())}, {"covariance", to_json(g.covariance())}};
}

inline json to_json(const Distribution& d) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return gaussian_to_json(k);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          json comps = json::array();
          for (const auto& c : k.components()) {
            comps.push_back(gaussian_to_json(c));
          }
          return {{"kind", "gaussian_mixture"}, {"weights", k.weights()}, {"components", comps}};
        } else if constexpr (std::is_same_v<T, TwoMoons>) {
          return {{"kind", "two_moons"}, {"noise_scale", k.noise_scale}};
        } else {
          return {{"kind", "rings"}, {"radii", k.radii}, {"noise_scale", k.noise_scale}};
        }
      },
      d.kind());
}

inline Gaussian gaussian_from_json(const json& j) {
  return Gaussian{vec_from_json(j.at("mean")), mat_from_json(j.at("covariance"))};
}

/// Parses a distribution spec. `gaussian_mixture` also accepts the shorthand
/// `{"kind": "gaussian_mixture", "circle": {"modes": 8, "radius": 2, "sigma": 0.25}}`.
inline Distribution distribution_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
      return gaussian_from_json(j);
    }
    if (kind == "gaussian_mixture") {
      if (j.contains("circle")) {
        const auto& c = j.at("circle");
        return GaussianMixture::circle(c.at("modes").get<std::size_t>(), c.at("radius").get<double>(),
                                       c.at("sigma").get<double>());
      }
      std::vector<Gaussian> comps;
      for (const auto& c : j.at("components")) {
        comps.push_back(gaussian_from_json(c));
      }
      return GaussianMixture{j.at("weights").get<std::vector<double>>(), std::move(comps)};
    }
    if (kind == "two_moons") {
      return TwoMoons{j.value("noise_scale", 0.1)};
    }
    if (kind == "rings") {
      return Rings{j.value("radii", std::vector<double>{1.0, 2.0}), j.value("noise_scale", 0.1)};
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("distribution spec: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("distribution spec: ") + e.what());
  }
}

// Models -------------------------------------------------------------------------------------

inline constexpr std::string_view kModelFormat = "ratio-mc-mlp";

/// Layer sizes, activation, standardizer and row-major parameters of a network.
inline json to_json(const MlpClassifier& model) {
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index k = 0; k < layer.weights.cols(); ++k) {
        w.push_back(layer.weights(i, k));
      }
    }
    layers.push_back({{"weights", w}, {"bias", to_json(layer.bias)}});
  }
  return {{"format", kModelFormat},
          {"format_version", 1},
          {"layer_sizes", model.layer_sizes()},
          {"activation", to_string(model.activation())},
          {"standardizer", {{"mean", to_json(model.standardizer().mean)}, {"scale", to_json(model.standardizer().scale)}}},
          {"layers", layers}};
}

inline MlpClassifier model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ParseError(1, "not a ratio-mc model file");
    }
    const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto& layers_json = j.at("layers");
    if (sizes.size() != layers_json.size() + 1) {
      throw ParseError(1, "layer_sizes does not match the number of layers");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < layers_json.size(); ++l) {
      const auto rows = static_cast<Eigen::Index>(sizes[l + 1]);
      const auto cols = static_cast<Eigen::Index>(sizes[l]);
      const auto w = layers_json[l].at("weights").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols) {
        throw ParseError(1, "layer " + std::to_string(l) + ": weight count does not match layer sizes");
      }
      DenseLayer layer{Mat(rows, cols), vec_from_json(layers_json[l].at("bias"))};
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
          layer.weights(i, k) = w[static_cast<std::size_t>(i * cols + k)];
        }
      }
      layers.push_back(std::move(layer));
    }
    Standardizer s{vec_from_json(j.at("standardizer").at("mean")), vec_from_json(j.at("standardizer").at("scale"))};
    return MlpClassifier{activation_from_string(j.at("activation").get<std::string>()), std::move(s), std::move(layers)};
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("model file: ") + e.what());
  }
}

// Training configuration ---------------------------------------------------------------------

inline json to_json(const TrainConfig& cfg) {
  json opt;
  if (const auto* adam = std::get_if<AdamConfig>(&cfg.optimizer)) {
    opt = {{"kind", "adam"}, {"beta1", adam->beta1}, {"beta2", adam->beta2}, {"epsilon", adam->epsilon}};
  } else {
    opt = {{"kind", "sgd"}};
  }
  return {{"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"optimizer", opt},
          {"seed", cfg.seed},
          {"early_stop_patience", cfg.early_stop_patience},
          {"train_fraction", cfg.train_fraction},
          {"hidden_layers", cfg.hidden_layers},
          {"activation", to_string(cfg.activation)}};
}

/// Missing keys keep their defaults.
inline TrainConfig train_config_from_json(const json& j, TrainConfig cfg = {}) {
  try {
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.early_stop_patience = j.value("early_stop_patience", cfg.early_stop_patience);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    cfg.hidden_layers = j.value("hidden_layers", cfg.hidden_layers);
    if (j.contains("activation")) {
      cfg.activation = activation_from_string(j.at("activation").get<std::string>());
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      const auto kind = o.is_string() ? o.get<std::string>() : o.at("kind").get<std::string>();
      if (kind == "adam") {
        AdamConfig adam;
        if (o.is_object()) {
          adam.beta1 = o.value("beta1", adam.beta1);
          adam.beta2 = o.value("beta2", adam.beta2);
          adam.epsilon = o.value("epsilon", adam.epsilon);
        }
        cfg.optimizer = adam;
      } else if (kind == "sgd") {
        cfg.optimizer = SgdConfig{};
      } else {
        throw ConfigError("unknown optimizer '" + kind + "'");
      }
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// Results ------------------------------------------------------------------------------------

inline json to_json(const SampleMeta& m) {
  json j = {{"sampler", m.sampler},
            {"seed", m.seed},
            {"stream_id", m.stream_id},
            {"n_proposed", m.n_proposed},
            {"n_accepted", m.n_accepted},
            {"clamp_events", m.clamp_events},
            {"cap_events", m.cap_events},
            {"budget_exhausted", m.budget_exhausted},
            {"degenerate_weights", m.degenerate_weights}};
  j["c_final"] = m.c_final ? json(*m.c_final) : json(nullptr);
  return j;
}

inline json to_json(const MarginalComparison& m) {
  return {{"direction", to_json(m.direction)},
          {"ks_statistic", m.ks.statistic},
          {"p_value", m.ks.p_value},
          {"mean_delta", m.mean_delta},
          {"variance_delta", m.variance_delta}};
}

inline json to_json(const TwoSampleReport& r) {
  json marginals = json::array();
  for (const auto& m : r.marginals) {
    marginals.push_back(to_json(m));
    marginals.back()["p_value_bonferroni"] = r.corrected(m.ks.p_value);
  }
  json projections = json::array();
  for (const auto& m : r.projections) {
    projections.push_back(to_json(m));
    projections.back()["p_value_bonferroni"] = r.corrected(m.ks.p_value);
  }
  return {{"n_a", r.n_a},
          {"n_b", r.n_b},
          {"n_tests", r.n_tests()},
          {"projection_seed", r.projection_seed},
          {"projection_stream", r.projection_stream},
          {"marginals", marginals},
          {"projections", projections},
          {"min_p_value_bonferroni", r.min_corrected_p_value()}};
}

// Files --------------------------------------------------------------------------------------

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  os << text;
  if (!os) {
    throw IoError("write failed: " + path.string());
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline void save_model(const MlpClassifier& model, const std::filesystem::path& path) {
  write_json_file(path, to_json(model));
}

inline MlpClassifier load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

/// Points as CSV with header `x0,...,x{d-1}`.
inline void write_points_csv(std::ostream& os, std::span<const Vec> points, Eigen::Index dim) {
  for (Eigen::Index j = 0; j < dim; ++j) {
    os << (j ? "," : "") << 'x' << j;
  }
  os << '\n';
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      os << (j ? "," : "") << format_double(p[j]);
    }
    os << '\n';
  }
}

inline void save_points_csv(const std::filesystem::path& path, std::span<const Vec> points, Eigen::Index dim) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_points_csv(os, points, dim);
}

inline Points load_points_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(is, line)) {
    throw ParseError(1, "missing header");
  }
  detail::strip_cr(line);
  const auto dim = detail::split_commas(line).size();
  Points points;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) {
      continue;
    }
    const auto fields = detail::split_commas(line);
    if (fields.size() != dim) {
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " fields");
    }
    Vec x(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      x[static_cast<Eigen::Index>(k)] = detail::parse_double(fields[k], line_no);
    }
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace ratio_mc::io

#endif
