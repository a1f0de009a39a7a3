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

#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  namespace cli = ratio_mc::cli;

  CLI::App app{"Classifier-based density ratios for acceptance-rejection, IMH and SIR sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ratio_mc::kVersion));

  std::string config_path;
  std::string output_dir;
  std::string preset;
  bool oracle = false;

  auto add_common = [&](CLI::App* sub, bool with_oracle) {
    sub->add_option("--config", config_path, "Run configuration (JSON)");
    sub->add_option("--output-dir", output_dir, "Output directory; overrides the config");
    if (with_oracle) {
      sub->add_flag("--oracle", oracle, "Use the exact-density posterior instead of a trained model");
    }
  };
  auto* gen = app.add_subcommand("gen-data", "Draw the labeled dataset");
  auto* trn = app.add_subcommand("train", "Train the classifier on the dataset");
  auto* smp = app.add_subcommand("sample", "Run the configured sampler");
  auto* evl = app.add_subcommand("evaluate", "Compare samples against the target");
  auto* demo = app.add_subcommand("demo", "gen-data, train, sample and evaluate in one go");
  add_common(gen, false);
  add_common(trn, false);
  add_common(smp, true);
  add_common(evl, true);
  add_common(demo, true);
  demo->add_option("--preset", preset, "gaussian-1d, gmm-2d, two-moons or rings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kUsageError;
  }

  try {
    std::optional<std::filesystem::path> out_override;
    if (!output_dir.empty()) {
      out_override = output_dir;
    }
    cli::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = cli::load_config(config_path, out_override);
    } else if (demo->parsed() && !preset.empty()) {
      cfg = cli::parse_config(cli::preset_config(preset), std::filesystem::current_path(), out_override);
    } else {
      std::cerr << "error: --config is required" << (demo->parsed() ? " (or --preset)" : "") << "\n";
      return cli::kUsageError;
    }
    if (demo->parsed() && !preset.empty() && !config_path.empty()) {
      auto raw = cfg.raw;
      raw["preset"] = preset;
      cfg = cli::parse_config(raw, cfg.base_dir, out_override);
    }

    if (gen->parsed()) {
      return cli::cmd_gen_data(cfg, std::cout);
    }
    if (trn->parsed()) {
      return cli::cmd_train(cfg, std::cout);
    }
    if (smp->parsed()) {
      return cli::cmd_sample(cfg, oracle, std::cout);
    }
    if (evl->parsed()) {
      return cli::cmd_evaluate(cfg, oracle, std::cout);
    }
    return cli::cmd_demo(cfg, oracle, std::cout);
  } catch (const ratio_mc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kRuntimeError;
  }
}
