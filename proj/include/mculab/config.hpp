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

#ifndef MCULAB_CONFIG_HPP_
#define MCULAB_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mculab/baselines.hpp"
#include "mculab/data.hpp"
#include "mculab/nn.hpp"
#include "mculab/pathway.hpp"

namespace mcu {

enum class Scenario { kRandom, kClasswise };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

/// Everything a run needs. Defaults describe the blobs fixture; the mask
/// defaults are k = 0.5 and k_r = 0.1.
struct ExperimentConfig {
  DatasetSpec dataset{GeneratorKind::kBlobs, 2000};
  std::size_t test_size = 4000;
  double val_fraction = 0.1;

  Scenario scenario = Scenario::kRandom;
  double forget_ratio = 0.1;
  int forget_class = 2;
  bool stratified = false;

  std::vector<std::size_t> hidden = {64, 64};
  Activation activation = Activation::kRelu;

  TrainConfig original;  // also used for RT
  Method method = Method::kNegGradPlus;
  UnlearnConfig unlearn;

  double mask_k = 0.5;
  double mask_k_r = 0.1;
  CurveTrainConfig curve;

  std::vector<double> sweep_beta;
  std::vector<double> sweep_k;
  std::vector<double> sweep_k_r;

  std::uint64_t seed = 0;
  std::string out = "out";

  ExperimentConfig();

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  Architecture architecture() const;
  /// Canonical key = value text; parse_config(to_text()) reproduces *this.
  /// Without `out`, the text depends only on what is computed.
  std::string to_text(bool include_out = true) const;
  /// Hex digest of to_text(false).
  std::string hash() const;

  bool operator==(const ExperimentConfig&) const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated
/// keys and malformed values throw ConfigError naming the line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one key on an existing config with the same typing rules.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// All recognised keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Derived 64-bit seed for a named purpose.
std::uint64_t sub_seed(std::uint64_t root, std::string_view name);

}  // namespace mcu

#endif  // MCULAB_CONFIG_HPP_
