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

#ifndef MCULAB_EXPERIMENT_HPP_
#define MCULAB_EXPERIMENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mculab/config.hpp"
#include "mculab/data.hpp"
#include "mculab/eval.hpp"
#include "mculab/mask.hpp"
#include "mculab/nn.hpp"
#include "mculab/pathway.hpp"
#include "mculab/reference.hpp"

namespace mcu {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// In-memory pipeline. Each step is deterministic in (config, seed).

DataSplits prepare_data(const ExperimentConfig& config);

struct OriginalModel {
  ParamSet theta_o;
  ReferenceAccuracies refs;
  double seconds = 0.0;
};

OriginalModel train_original(const ExperimentConfig& config, const DataSplits& splits);

struct TimedParams {
  ParamSet params;
  double seconds = 0.0;
};

/// Gold reference trained from scratch on D_r with the original settings.
TimedParams train_rt(const ExperimentConfig& config, const DataSplits& splits);

/// The configured pre-unlearning method applied to theta_o.
TimedParams pre_unlearn(const ExperimentConfig& config, const ParamSet& theta_o,
                        const DataSplits& splits);

struct McuOutcome {
  ParameterMask mask;
  BezierCurve curve;
  CurveTrainResult training;
  double mask_seconds = 0.0;
  double curve_seconds = 0.0;
};

McuOutcome train_mcu(const ExperimentConfig& config, const ParamSet& theta_o,
                     const ParamSet& theta_p, const DataSplits& splits,
                     const ReferenceAccuracies& refs);

// ---------------------------------------------------------------------------
// Results

struct OptimalSummary {
  double t_star = 1.0;
  double fitted_gap = 0.0;
  double measured_gap = 0.0;
  std::array<double, 3> sample_gaps{};
  double endpoint_gap = 0.0;  // alignment gap of theta_p
};

struct CurveSummary {
  std::string mask_digest;
  std::size_t mask_selected = 0;
  std::size_t tensor_count = 0;
  std::size_t steps = 0;
  std::size_t beta_zero = 0;
  std::size_t beta_mild = 0;
  std::size_t beta_strong = 0;
  std::size_t beta_fixed = 0;
  double final_beta = 0.0;
  double last_loss = 0.0;
};

/// Wall-clock seconds per measured step (original, rt, unlearn, mask, curve,
/// select). Kept apart from the bundle so the bundle stays reproducible.
using Timings = std::map<std::string, double>;

struct ResultsBundle {
  std::string version{kVersion};
  std::string config_text;  // canonical, without the output directory
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string scenario;
  std::string architecture;
  std::string pre_method;  // display name, empty when absent
  std::map<std::string, std::uint64_t> seeds;
  ReferenceAccuracies refs;
  /// Row order: Original, RT, pre-unlearning, MCU (whichever exist).
  std::vector<MetricsReport> methods;
  std::optional<OptimalSummary> optimal;
  std::vector<Interval> region;
  PathProfile profile;
  std::optional<CurveSummary> curve;
  std::map<std::string, std::string> digests;

  Timings timings;  // not serialised by to_json()

  const MetricsReport* find(std::string_view method) const;
  const MetricsReport* rt() const { return find("RT"); }
  /// Deterministic JSON; no wall-clock values.
  std::string to_json() const;
  static ResultsBundle from_json(std::string_view text);
};

CurveSummary summarize(const McuOutcome& mcu);

/// Everything evaluate needs; optional members may be absent.
struct ModelSet {
  ParamSet theta_o;
  ReferenceAccuracies refs;
  std::optional<ParamSet> theta_rt;
  std::optional<ParamSet> theta_p;
  std::optional<BezierCurve> curve;
  std::optional<CurveSummary> curve_summary;
};

/// Evaluates whatever models are present. RTE: RT = retraining, the
/// pre-unlearning method = its own run, MCU = pre-unlearning + mask + curve
/// + optimal-model selection.
ResultsBundle assemble_bundle(const ExperimentConfig& config, const DataSplits& splits,
                              const ModelSet& models, Timings timings);

// ---------------------------------------------------------------------------
// File-based stages. Each reads only artifacts written by earlier stages
// under `config.out` and throws ConfigError when one is missing.

enum class Stage { kTrainOriginal, kUnlearn, kMcu, kEvaluate, kReport, kSweep, kRun };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

void stage_train_original(const ExperimentConfig& config);
void stage_unlearn(const ExperimentConfig& config);
void stage_mcu(const ExperimentConfig& config);
ResultsBundle stage_evaluate(const ExperimentConfig& config);
void stage_report(const ExperimentConfig& config);

/// Runs the named stage, wrapping failures in a StageError.
void run_stage(Stage stage, const ExperimentConfig& config);

/// All stages in order; returns the evaluated bundle.
ResultsBundle run_experiment(const ExperimentConfig& config);

struct SweepPoint {
  std::string label;  // e.g. "beta=0.1"
  ExperimentConfig config;
};

/// Cartesian grid over sweep.beta x sweep.k x sweep.k_r (beta points use
/// fixed mode). Each point writes into out/sweep/<label>.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<ResultsBundle> bundles;
};

/// Trains theta_o, RT and theta_p once, then the grid with up to `threads`
/// workers. Writes out/sweep.csv and one profile per point.
SweepResult run_sweep(const ExperimentConfig& config, std::size_t threads);

/// MCULAB_THREADS, defaulting to hardware concurrency (at least 1).
std::size_t sweep_threads_from_env();

}  // namespace mcu

#endif  // MCULAB_EXPERIMENT_HPP_
