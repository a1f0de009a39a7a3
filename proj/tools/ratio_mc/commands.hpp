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

#ifndef RATIO_MC_TOOLS_COMMANDS_HPP
#define RATIO_MC_TOOLS_COMMANDS_HPP

#include <ratio_mc/io/json_io.hpp>
#include <ratio_mc/ratio_mc.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

/**
 * \file
 * \brief The `ratio-mc` subcommands: gen-data, train, sample, evaluate and demo.
 *
 * Each command reads a JSON run configuration and writes its artifacts plus a JSON manifest
 * into the output directory. Manifests carry the config hash and library version and never a
 * timestamp, so reruns are byte-identical.
 */

namespace ratio_mc::cli {

namespace fs = std::filesystem;
using io::json;

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kUsageError = 1, kRuntimeError = 2, kBudgetExhausted = 3 };

// Streams derived from the config seed.
inline constexpr std::uint64_t kDataStream = 10;
inline constexpr std::uint64_t kSampleStream = 20;
inline constexpr std::uint64_t kReferenceStream = 30;
inline constexpr std::uint64_t kProjectionStream = 31;

inline constexpr const char* kDatasetFile = "dataset.csv";
inline constexpr const char* kDatasetManifest = "dataset_manifest.json";
inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kLossTraceFile = "loss_trace.csv";
inline constexpr const char* kTrainManifest = "train_manifest.json";
inline constexpr const char* kSamplesFile = "samples.csv";
inline constexpr const char* kWeightedSamplesFile = "weighted_samples.csv";
inline constexpr const char* kSamplesMeta = "samples_meta.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kRatioGridFile = "ratio_grid.csv";

/// FNV-1a over the bytes of `text`, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

/// Built-in demo configurations.
inline json preset_config(std::string_view name) {
  const json sir_2d = {{"kind", "sir"}, {"n_proposals", 100000}, {"m_resampled", 20000}, {"scheme", "multinomial"}};
  const json eval_2d = {{"n_reference", 20000},
                        {"n_projections", 10},
                        {"alpha", 1e-3},
                        {"grid", {{"lo", {-4.0, -4.0}}, {"hi", {4.0, 4.0}}, {"n", 500}}}};
  if (name == "gaussian-1d") {
    return {{"experiment", "gaussian-1d"},
            {"seed", 20240601},
            {"target", {{"kind", "gaussian"}, {"mean", {0.0}}, {"covariance", {{1.0}}}}},
            {"instrumental", {{"kind", "gaussian"}, {"mean", {0.0}}, {"covariance", {{4.0}}}}},
            {"dataset", {{"n1", 10000}, {"n0", 10000}}},
            {"train", json::object()},
            {"sampler", {{"kind", "ar"}, {"n_target", 10000}}},
            {"evaluation", {{"n_reference", 10000}, {"n_projections", 0}, {"alpha", 1e-3}}},
            {"output_dir", "gaussian-1d"}};
  }
  if (name == "gmm-2d") {
    return {{"experiment", "gmm-2d"},
            {"seed", 20240602},
            {"target", {{"kind", "gaussian_mixture"}, {"circle", {{"modes", 8}, {"radius", 2.0}, {"sigma", 0.25}}}}},
            {"instrumental", "moment_fit"},
            {"dataset", {{"n1", 20000}, {"n0", 20000}}},
            {"train", json::object()},
            {"sampler", sir_2d},
            {"evaluation", eval_2d},
            {"output_dir", "gmm-2d"}};
  }
  if (name == "two-moons") {
    return {{"experiment", "two-moons"},
            {"seed", 20240603},
            {"target", {{"kind", "two_moons"}, {"noise_scale", 0.1}}},
            {"instrumental", "moment_fit"},
            {"dataset", {{"n1", 20000}, {"n0", 20000}}},
            {"train", json::object()},
            {"sampler", sir_2d},
            {"evaluation", eval_2d},
            {"output_dir", "two-moons"}};
  }
  if (name == "rings") {
    return {{"experiment", "rings"},
            {"seed", 20240604},
            {"target", {{"kind", "rings"}, {"radii", {1.0, 2.0}}, {"noise_scale", 0.1}}},
            {"instrumental", "moment_fit"},
            {"dataset", {{"n1", 20000}, {"n0", 20000}}},
            {"train", json::object()},
            {"sampler", sir_2d},
            {"evaluation", eval_2d},
            {"output_dir", "rings"}};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected gaussian-1d, gmm-2d, two-moons or rings)");
}

/// A parsed run configuration with paths resolved.
struct RunConfig {
  json raw;
  fs::path base_dir;
  fs::path output_dir;
  std::string experiment;
  std::uint64_t seed = 0;
  json target;
  json instrumental;
  std::size_t n1 = 0;
  std::size_t n0 = 0;
  TrainConfig train;
  json sampler;
  json evaluation;
  std::optional<fs::path> model_path;
  std::optional<fs::path> dataset_path;
  std::string hash;

  [[nodiscard]] bool moment_fit() const { return instrumental.is_string() && instrumental == "moment_fit"; }
};

/// Validates `raw` (a preset is expanded first and `raw` patched over it).
inline RunConfig parse_config(json raw, const fs::path& base_dir, const std::optional<fs::path>& output_override) {
  try {
    if (raw.contains("preset")) {
      json merged = preset_config(raw.at("preset").get<std::string>());
      merged.merge_patch(raw);
      raw = std::move(merged);
    }
    RunConfig cfg;
    cfg.raw = raw;
    cfg.base_dir = base_dir;
    if (!raw.contains("seed")) {
      throw ConfigError("config: 'seed' is mandatory");
    }
    cfg.seed = raw.at("seed").get<std::uint64_t>();
    cfg.experiment = raw.value("experiment", std::string("experiment"));
    cfg.target = raw.at("target");
    cfg.instrumental = raw.at("instrumental");
    if (!cfg.moment_fit() && !cfg.instrumental.is_object()) {
      throw ConfigError("config: 'instrumental' must be a distribution spec or \"moment_fit\"");
    }
    // Fail early on malformed specs.
    const auto target = io::distribution_from_json(cfg.target);
    if (!cfg.moment_fit() && io::distribution_from_json(cfg.instrumental).dim() != target.dim()) {
      throw ConfigError("config: target and instrumental dimensions differ");
    }
    const auto& ds = raw.at("dataset");
    cfg.n1 = ds.at("n1").get<std::size_t>();
    cfg.n0 = ds.at("n0").get<std::size_t>();
    if (cfg.n1 == 0 || cfg.n0 == 0) {
      throw ConfigError("config: dataset sizes must be positive");
    }
    if (ds.contains("file")) {
      cfg.dataset_path = base_dir / ds.at("file").get<std::string>();
    }
    TrainConfig defaults;
    defaults.seed = cfg.seed;
    cfg.train = io::train_config_from_json(raw.value("train", json::object()), defaults);
    cfg.sampler = raw.value("sampler", json{{"kind", "ar"}});
    cfg.evaluation = raw.value("evaluation", json::object());
    if (raw.contains("model")) {
      cfg.model_path = base_dir / raw.at("model").get<std::string>();
    }
    if (output_override) {
      cfg.output_dir = *output_override;
    } else {
      cfg.output_dir = base_dir / raw.value("output_dir", std::string("out"));
    }
    cfg.hash = fnv1a_hex(raw.dump());
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_config(const fs::path& path, const std::optional<fs::path>& output_override) {
  json raw;
  {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
      throw ConfigError("cannot open config " + path.string());
    }
    try {
      raw = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return parse_config(std::move(raw), path.parent_path(), output_override);
}

/// Fields shared by every manifest.
inline json manifest_header(const RunConfig& cfg, std::string_view command) {
  return {{"command", command},
          {"experiment", cfg.experiment},
          {"config_hash", cfg.hash},
          {"library_version", kVersion},
          {"rng_algorithm", kRngAlgorithm},
          {"seed", cfg.seed}};
}

/// Writes through a temporary file so a failed run never leaves a partial artifact.
inline void write_atomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  io::write_text_file(tmp, text);
  fs::rename(tmp, path);
}

inline fs::path dataset_path(const RunConfig& cfg) {
  return cfg.dataset_path.value_or(cfg.output_dir / kDatasetFile);
}

inline Distribution resolve_target(const RunConfig& cfg) { return io::distribution_from_json(cfg.target); }

/// The instrumental distribution; a moment fit is read back from the dataset manifest.
inline Distribution resolve_instrumental(const RunConfig& cfg) {
  if (!cfg.moment_fit()) {
    return io::distribution_from_json(cfg.instrumental);
  }
  const auto manifest_path = cfg.output_dir / kDatasetManifest;
  if (!fs::exists(manifest_path)) {
    throw IoError("moment-fit instrumental requires " + manifest_path.string() + " (run gen-data first)");
  }
  return io::distribution_from_json(io::read_json_file(manifest_path).at("instrumental"));
}

// gen-data -----------------------------------------------------------------------------------

inline int cmd_gen_data(const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  auto rng = create_rng(cfg.seed, kDataStream);
  const auto target = resolve_target(cfg);
  auto target_points = target.sample(cfg.n1, rng);
  const Distribution instrumental =
      cfg.moment_fit() ? Distribution{fit_gaussian_moments(target_points)} : io::distribution_from_json(cfg.instrumental);
  if (instrumental.dim() != target.dim()) {
    throw ConfigError("target and instrumental dimensions differ");
  }
  auto instrumental_points = instrumental.sample(cfg.n0, rng);
  const auto ds = assemble_dataset(std::move(target_points), std::move(instrumental_points), rng);

  std::ostringstream csv;
  write_dataset_csv(csv, ds);
  const auto out_path = dataset_path(cfg);
  write_atomically(out_path, csv.str());

  json manifest = manifest_header(cfg, "gen-data");
  manifest["stream_id"] = kDataStream;
  manifest["target"] = io::to_json(target);
  manifest["instrumental"] = io::to_json(instrumental);
  manifest["instrumental_source"] = cfg.moment_fit() ? "moment_fit" : "config";
  manifest["n1"] = ds.n1();
  manifest["n0"] = ds.n0();
  manifest["dim"] = ds.dim();
  manifest["dataset_file"] = out_path.filename().string();
  write_atomically(cfg.output_dir / kDatasetManifest, manifest.dump(2) + "\n");
  log << "gen-data: wrote " << ds.size() << " rows to " << out_path.string() << "\n";
  return kSuccess;
}

// train --------------------------------------------------------------------------------------

inline int cmd_train(const RunConfig& cfg, std::ostream& log) {
  const auto ds = load_csv(dataset_path(cfg));
  fs::create_directories(cfg.output_dir);
  const auto result = train(ds, cfg.train);
  const auto posterior = PosteriorFn::from_mlp(result.model);
  const double acc = accuracy(posterior, ds);
  const double mean_bce = bce_loss(posterior, ds) / static_cast<double>(ds.size());

  std::ostringstream trace;
  trace << "epoch,train_loss,validation_loss\n";
  trace << 0 << ',' << format_double(result.trace.initial_train_loss) << ','
        << format_double(result.trace.initial_validation_loss) << '\n';
  for (std::size_t e = 0; e < result.trace.train_loss.size(); ++e) {
    trace << e + 1 << ',' << format_double(result.trace.train_loss[e]) << ','
          << format_double(result.trace.validation_loss[e]) << '\n';
  }
  write_atomically(cfg.output_dir / kLossTraceFile, trace.str());
  write_atomically(cfg.output_dir / kModelFile, io::to_json(result.model).dump(2) + "\n");

  json manifest = manifest_header(cfg, "train");
  manifest["train_config"] = io::to_json(cfg.train);
  manifest["epochs_run"] = result.trace.train_loss.size();
  manifest["best_epoch"] = result.trace.best_epoch;
  manifest["accuracy"] = acc;
  manifest["mean_bce"] = mean_bce;
  manifest["n1"] = ds.n1();
  manifest["n0"] = ds.n0();
  manifest["model_file"] = kModelFile;
  manifest["loss_trace_file"] = kLossTraceFile;
  write_atomically(cfg.output_dir / kTrainManifest, manifest.dump(2) + "\n");
  log << "train: " << result.trace.train_loss.size() << " epochs, best epoch " << result.trace.best_epoch
      << ", accuracy " << acc << "\n";
  return kSuccess;
}

// sample -------------------------------------------------------------------------------------

/// The ratio estimator a sampling/evaluation run uses: exact densities or a stored model.
inline RatioEstimator make_estimator(const RunConfig& cfg, bool oracle) {
  const double eps = cfg.sampler.value("clamp_eps", kDefaultClampEps);
  if (oracle) {
    const auto target = resolve_target(cfg);
    const auto instrumental = resolve_instrumental(cfg);
    return RatioEstimator{oracle_posterior(target, instrumental, cfg.n1, cfg.n0), cfg.n0, cfg.n1, eps};
  }
  const auto path = cfg.model_path.value_or(cfg.output_dir / kModelFile);
  if (!fs::exists(path)) {
    throw IoError("model file " + path.string() + " not found (run train first, or pass --oracle)");
  }
  return RatioEstimator{PosteriorFn::from_mlp(io::load_model(path)), cfg.n0, cfg.n1, eps};
}

/// Integrands selectable by name for the `is` sampler.
inline Integrand integrand_from_name(const std::string& name) {
  if (name == "one") {
    return {[](const Vec&) { return 1.0; }, name};
  }
  if (name == "x") {
    return {[](const Vec& x) { return x[0]; }, name};
  }
  if (name == "x2") {
    return {[](const Vec& x) { return x[0] * x[0]; }, name};
  }
  if (name == "norm2") {
    return {[](const Vec& x) { return x.squaredNorm(); }, name};
  }
  throw ConfigError("unknown integrand '" + name + "' (expected one, x, x2 or norm2)");
}

inline int cmd_sample(const RunConfig& cfg, bool oracle, std::ostream& log) {
  const auto est = make_estimator(cfg, oracle);
  const auto instrumental = resolve_instrumental(cfg);
  const auto kind = cfg.sampler.value("kind", std::string("ar"));
  fs::create_directories(cfg.output_dir);
  auto rng = create_rng(cfg.seed, kSampleStream);

  json meta = manifest_header(cfg, "sample");
  meta["oracle"] = oracle;
  meta["estimator"] = {{"posterior", est.posterior().name()}, {"n0", est.n0()}, {"n1", est.n1()},
                       {"clamp_eps", est.clamp_eps()}};
  meta["sampler_config"] = cfg.sampler;
  meta["samples_file"] = kSamplesFile;
  int code = kSuccess;
  Points points;

  try {
    if (kind == "ar") {
      const auto n_target = cfg.sampler.value("n_target", std::size_t{10000});
      std::optional<std::size_t> budget;
      if (cfg.sampler.contains("max_proposals")) {
        budget = cfg.sampler.at("max_proposals").get<std::size_t>();
      }
      const auto ds = load_csv(dataset_path(cfg));
      const auto envelope = estimate_C(est, ds);
      meta["c_initial"] = envelope.value();
      auto result = ar_sample(est, envelope, instrumental, n_target, budget, rng);
      meta["meta"] = io::to_json(result.meta);
      meta["acceptance_rate"] = acceptance_rate(result);
      points = std::move(result.points);
      if (result.meta.budget_exhausted) {
        code = kBudgetExhausted;
      }
    } else if (kind == "imh") {
      const auto n_steps = cfg.sampler.value("n_steps", std::size_t{50000});
      const auto burn_in = cfg.sampler.value("burn_in", n_steps / 10);
      const auto chains = cfg.sampler.value("chains", std::size_t{1});
      auto result = chains == 1 ? imh_chain(est, instrumental, n_steps, burn_in, std::nullopt, rng)
                                : imh_chains(est, instrumental, chains, n_steps, burn_in, cfg.seed, kSampleStream);
      meta["meta"] = io::to_json(result.meta);
      meta["acceptance_rate"] = result.acceptance_rate;
      meta["burn_in"] = result.burn_in;
      points = std::move(result.states);
    } else if (kind == "sir") {
      const auto n = cfg.sampler.value("n_proposals", std::size_t{100000});
      const auto m = cfg.sampler.value("m_resampled", std::size_t{10000});
      const auto scheme = resampling_scheme_from_string(cfg.sampler.value("scheme", std::string("multinomial")));
      auto result = sir_sample(est, instrumental, n, m, scheme, rng);
      meta["meta"] = io::to_json(result.resampled.meta);
      meta["ess"] = result.ess;
      meta["weights"] = *result.weighted.weights;
      meta["weighted_samples_file"] = kWeightedSamplesFile;
      std::ostringstream weighted;
      io::write_points_csv(weighted, result.weighted.points, instrumental.dim());
      write_atomically(cfg.output_dir / kWeightedSamplesFile, weighted.str());
      points = std::move(result.resampled.points);
    } else if (kind == "is") {
      const auto n = cfg.sampler.value("n", std::size_t{100000});
      const auto f = integrand_from_name(cfg.sampler.value("integrand", std::string("x2")));
      const auto result = is_estimate(est, instrumental, f, n, rng);
      meta["integrand"] = f.name;
      meta["estimate"] = result.estimate;
      meta["std_error"] = result.std_error;
      meta["ess"] = result.ess;
      meta["clamp_events"] = result.clamp_events;
      meta.erase("samples_file");
    } else {
      throw ConfigError("unknown sampler kind '" + kind + "' (expected ar, imh, sir or is)");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sampler config: ") + e.what());
  }

  if (kind != "is") {
    std::ostringstream csv;
    io::write_points_csv(csv, points, instrumental.dim());
    write_atomically(cfg.output_dir / kSamplesFile, csv.str());
    meta["n_samples"] = points.size();
  }
  write_atomically(cfg.output_dir / kSamplesMeta, meta.dump(2) + "\n");
  log << "sample: " << kind << (oracle ? " (oracle)" : "") << ", " << points.size() << " points";
  if (meta.contains("acceptance_rate")) {
    log << ", acceptance rate " << meta["acceptance_rate"].get<double>();
  }
  if (code == kBudgetExhausted) {
    log << ", proposal budget exhausted";
  }
  log << "\n";
  return code;
}

// evaluate -----------------------------------------------------------------------------------

inline int cmd_evaluate(const RunConfig& cfg, bool oracle, std::ostream& log) {
  const auto samples_path = cfg.output_dir / kSamplesFile;
  if (!fs::exists(samples_path)) {
    throw IoError("samples file " + samples_path.string() + " not found (run sample first)");
  }
  const auto samples = io::load_points_csv(samples_path);
  if (samples.empty()) {
    throw IoError("samples file is empty");
  }
  const auto target = resolve_target(cfg);
  Points reference;
  std::string reference_source;
  if (cfg.evaluation.contains("reference_file")) {
    const auto ref_path = cfg.base_dir / cfg.evaluation.at("reference_file").get<std::string>();
    reference = io::load_points_csv(ref_path);
    reference_source = ref_path.filename().string();
  } else {
    auto ref_rng = create_rng(cfg.seed, kReferenceStream);
    reference = target.sample(cfg.evaluation.value("n_reference", std::size_t{10000}), ref_rng);
    reference_source = "direct";
  }
  if (reference.empty() || reference.front().size() != samples.front().size()) {
    throw DimensionMismatch("evaluate: samples and reference differ in dimension");
  }
  auto proj_rng = create_rng(cfg.seed, kProjectionStream);
  const auto n_proj = cfg.evaluation.value("n_projections", std::size_t{10});
  const auto report = two_sample_report(samples, reference, n_proj, proj_rng);
  const double alpha = cfg.evaluation.value("alpha", 1e-3);

  json out = manifest_header(cfg, "evaluate");
  out["reference"] = reference_source;
  out["alpha"] = alpha;
  out["passes"] = report.passes(alpha);
  out["report"] = io::to_json(report);

  const auto dim = samples.front().size();
  if (dim == 2) {
    const auto est = make_estimator(cfg, oracle);
    std::vector<double> lo{-4.0, -4.0};
    std::vector<double> hi{4.0, 4.0};
    std::size_t n = 500;
    if (cfg.evaluation.contains("grid")) {
      const auto& g = cfg.evaluation.at("grid");
      lo = g.value("lo", lo);
      hi = g.value("hi", hi);
      n = g.value("n", n);
    }
    const Grid grid{{{lo.at(0), hi.at(0), n}, {lo.at(1), hi.at(1), n}}};
    Points nodes;
    nodes.reserve(grid.size());
    grid.for_each([&](const Vec& x, double) { nodes.push_back(x); });
    const auto evals = est.evaluate(std::span<const Vec>(nodes));
    std::ostringstream csv;
    csv << "x0,x1,log_ratio\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      csv << format_double(nodes[i][0]) << ',' << format_double(nodes[i][1]) << ','
          << format_double(est.log_prefactor() + evals[i].log_odds) << '\n';
    }
    write_atomically(cfg.output_dir / kRatioGridFile, csv.str());
    out["ratio_grid_file"] = kRatioGridFile;
  }
  write_atomically(cfg.output_dir / kReportFile, out.dump(2) + "\n");
  log << "evaluate: min Bonferroni p-value " << report.min_corrected_p_value() << " ("
      << (report.passes(alpha) ? "pass" : "reject") << " at alpha " << alpha << ")\n";
  return kSuccess;
}

// demo ---------------------------------------------------------------------------------------

inline int cmd_demo(const RunConfig& cfg, bool oracle, std::ostream& log) {
  int code = cmd_gen_data(cfg, log);
  if (code == kSuccess && !oracle) {
    code = cmd_train(cfg, log);
  }
  if (code == kSuccess) {
    code = cmd_sample(cfg, oracle, log);
  }
  if (code == kSuccess) {
    code = cmd_evaluate(cfg, oracle, log);
  }
  return code;
}

}  // namespace ratio_mc::cli

#endif
