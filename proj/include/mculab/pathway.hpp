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

#ifndef MCULAB_PATHWAY_HPP_
#define MCULAB_PATHWAY_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "mculab/dataset.hpp"
#include "mculab/mask.hpp"
#include "mculab/nn.hpp"
#include "mculab/reference.hpp"

namespace mcu {

/// Quadratic Bezier curve in parameter space:
///   phi(t) = (1-t)^2 o + 2(1-t)t c + t^2 p,  t in [0, 1].
/// Only the control point c is ever trained.
struct BezierCurve {
  ParamSet theta_o;
  ParamSet theta_c;
  ParamSet theta_p;

  /// Throws ConfigError unless the three sets are congruent.
  void validate() const;
};

/// Elementwise phi(t), evaluated as ((1-t)^2*o + 2(1-t)t*c) + t^2*p so the
/// endpoints reproduce theta_o and theta_p exactly.
ParamSet bezier_point(const BezierCurve& curve, double t);

/// Weight of the control point at t: 2(1-t)t.
double control_weight(double t);

/// (o + p) / 2; the initial curve then coincides with the straight segment.
ParamSet init_control(const ParamSet& theta_o, const ParamSet& theta_p);

struct McuLossResult {
  double loss = 0.0;          // retain_loss - beta * forget_loss
  double retain_loss = 0.0;
  double forget_loss = 0.0;
  double retain_accuracy = 0.0;
  double forget_accuracy = 0.0;
  Gradients grad_control;     // 2(1-t)t * d loss / d phi
};

/// Retain-minus-weighted-forget cross-entropy at phi(t) and its gradient
/// with respect to theta_c. With `mask`, gradients are only formed for
/// selected tensors.
McuLossResult mcu_loss(const Mlp& net, const BezierCurve& curve, double t,
                       const LabeledDataset& batch_r, const LabeledDataset& batch_f,
                       double beta, const TensorMask* mask = nullptr);

/// Penalty switch driven by accuracy alignment:
///   0    if acc_uf <= Acc_o(D_v)
///   0.1  if acc_uf > Acc_o(D_v) and
///          (acc_uf - Acc_o(D_v)) / Acc_o(D_v) <
///          (acc_ur - Acc_o(D_train)) / Acc_o(D_train)
///   0.5  otherwise
double adaptive_beta(double acc_uf, double acc_ur, const ReferenceAccuracies& refs);

enum class BetaMode { kFixed, kAdaptive };

std::string_view to_string(BetaMode m);
BetaMode parse_beta_mode(std::string_view s);

inline constexpr double kInitialBeta = 0.5;

/// Running state of the penalty coefficient during curve training.
struct BetaState {
  BetaMode mode = BetaMode::kAdaptive;
  double beta = kInitialBeta;
  double running_acc_f = 0.0;
  double running_acc_r = 0.0;
  bool primed = false;
  ReferenceAccuracies refs;

  /// Folds one batch's accuracies into the EMAs and, in adaptive mode,
  /// re-evaluates beta. Returns the beta to use for this batch.
  double update(double batch_acc_f, double batch_acc_r, double decay);
};

struct CurveTrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double lr = 0.05;
  double retain_proportion = 0.5;
  BetaMode beta_mode = BetaMode::kAdaptive;
  double beta = 0.2;  // used in fixed mode
  double ema_decay = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurveTrainResult {
  ParamSet theta_c;
  std::size_t steps = 0;
  std::vector<double> epoch_seconds;
  /// How many batches ran with beta 0, 0.1, 0.5 (adaptive) or the fixed value.
  std::size_t beta_zero = 0;
  std::size_t beta_mild = 0;
  std::size_t beta_strong = 0;
  std::size_t beta_fixed = 0;
  double final_beta = kInitialBeta;
  double last_loss = 0.0;
};

/// Masked optimisation of the control point. Per retain batch: draw
/// t ~ U(0,1), take the next forget batch from an independently shuffled
/// cyclic iterator, update beta (adaptive mode), and step theta_c on the
/// selected tensors only.
CurveTrainResult train_curve(const Mlp& net, const ParamSet& theta_o,
                             const ParamSet& theta_p, const LabeledDataset& d_r,
                             const LabeledDataset& d_f, const ParameterMask& mask,
                             const CurveTrainConfig& config,
                             const ReferenceAccuracies& refs);

/// Same, starting from an explicit control point.
CurveTrainResult train_curve(const Mlp& net, const ParamSet& theta_o,
                             const ParamSet& theta_p, ParamSet theta_c,
                             const LabeledDataset& d_r, const LabeledDataset& d_f,
                             const ParameterMask& mask, const CurveTrainConfig& config,
                             const ReferenceAccuracies& refs);

}  // namespace mcu

#endif  // MCULAB_PATHWAY_HPP_
