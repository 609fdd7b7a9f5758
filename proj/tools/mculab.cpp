// Copyright 2026 The mculab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mculab: staged experiment runner.
//
//   mculab <stage> [--config PATH] [--seed N] [--out DIR] [--set key=value]...
//   mculab --stage <stage> ...
//
// Exit codes: 0 ok, 2 configuration error, 3 numeric error, 1 anything else.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mculab/config.hpp"
#include "mculab/errors.hpp"
#include "mculab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int exit_code(mcu::StageError::Kind kind) {
  switch (kind) {
    case mcu::StageError::Kind::kConfig: return kExitConfig;
    case mcu::StageError::Kind::kNumeric: return kExitNumeric;
    case mcu::StageError::Kind::kOther: return kExitOther;
  }
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-connectivity unlearning experiments"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string stage_flag;
  std::vector<std::string> settings;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", seed, "root seed (overrides the config)");
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--stage", stage_flag, "stage to run, alternative to a subcommand");
  app.add_option("--set", settings, "extra key=value override, repeatable");
  app.require_subcommand(0, 1);

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"train-original", "train theta_o and record reference accuracies"},
      {"unlearn", "train RT and the pre-unlearning model theta_p"},
      {"mcu", "build the mask and train the curve control point"},
      {"evaluate", "select the optimal model and evaluate every model present"},
      {"report", "write summary.md, metrics.csv and profile.csv"},
      {"sweep", "grid over sweep.beta / sweep.k / sweep.k_r"},
      {"run", "all stages in order"},
  };
  for (const auto& [name, help] : stages) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    std::string stage_name = stage_flag;
    if (!app.get_subcommands().empty()) {
      const std::string sub = app.get_subcommands().front()->get_name();
      if (!stage_name.empty() && stage_name != sub) {
        throw mcu::ConfigError("--stage " + stage_name + " conflicts with subcommand " + sub);
      }
      stage_name = sub;
    }
    if (stage_name.empty()) throw mcu::ConfigError("no stage given; see --help");
    const mcu::Stage stage = mcu::parse_stage(stage_name);

    mcu::ExperimentConfig config =
        config_path.empty() ? mcu::ExperimentConfig{} : mcu::load_config(config_path);
    for (const auto& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw mcu::ConfigError("--set expects key=value");
      mcu::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) config.seed = *seed;
    if (!out.empty()) config.out = out;
    config.validate();

    mcu::run_stage(stage, config);
    if (stage == mcu::Stage::kRun || stage == mcu::Stage::kReport) {
      std::ifstream in(std::filesystem::path(config.out) / "summary.md");
      std::cout << in.rdbuf();
    } else if (stage == mcu::Stage::kEvaluate) {
      std::cout << "wrote " << (std::filesystem::path(config.out) / "bundle.json").string()
                << "\n";
    }
    return kExitOk;
  } catch (const mcu::StageError& e) {
    std::cerr << "mculab: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const mcu::ConfigError& e) {
    std::cerr << "mculab: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mcu::InvalidInputError& e) {
    std::cerr << "mculab: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mcu::NumericError& e) {
    std::cerr << "mculab: numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "mculab: " << e.what() << "\n";
    return kExitOther;
  }
}
