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

#ifndef MCULAB_BASELINES_HPP_
#define MCULAB_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "mculab/dataset.hpp"
#include "mculab/nn.hpp"

namespace mcu {

/// Plain minibatch SGD settings. Batches are reshuffled every epoch from the
/// "order" stream of `seed`.
struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Runs SGD on `data` from `params`. With `mask`, only selected elements
/// move. Aborts with NumericError on divergence. lr == 0 or epochs == 0
/// returns `params` untouched.
ParamSet train_sgd(const Mlp& net, ParamSet params, const LabeledDataset& data,
                   const TrainConfig& config, const ElementMask* mask = nullptr);

/// Fresh initialisation from `init_seed`, then SGD on `data`.
ParamSet train_from_scratch(const Mlp& net, const LabeledDataset& data,
                            const TrainConfig& config, std::uint64_t init_seed);

enum class Method {
  kRetrain,
  kFinetune,
  kRandomLabel,
  kGradientAscent,
  kNegGradPlus,
  kNegTaskVector,
  kSalunLite,
};

std::string_view to_string(Method m);   // "rt", "ft", "rl", "ga", "neggrad_plus", ...
std::string_view display_name(Method m);  // "RT", "FT", "RL", "GA", "NegGrad+", ...
Method parse_method(std::string_view s);

/// Settings shared by the approximate unlearning methods.
struct UnlearnConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 32;
  double lr = 0.01;
  std::uint64_t seed = 0;
  double alpha = 0.9;              // NegTV scaling
  std::size_t tv_epochs = 10;      // NegTV fine-tune on D_f
  double neggrad_beta = 0.2;       // NegGrad+ forget weight
  double saliency_fraction = 0.5;  // SalUn-lite

  void validate() const;
  TrainConfig train_config() const { return {epochs, batch_size, lr, seed}; }
};

/// Gold reference: fresh model trained on D_r only.
ParamSet retrain(const Mlp& net, const LabeledDataset& d_r, const TrainConfig& config,
                 std::uint64_t init_seed);

/// Continue training theta_o on D_r.
ParamSet finetune(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_r,
                  const UnlearnConfig& config);

/// D_f with every label replaced by a uniformly drawn wrong class.
LabeledDataset relabel_forget(const LabeledDataset& d_f, std::uint64_t seed);

/// Train theta_o on D_r plus relabelled D_f.
ParamSet random_label(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                      const LabeledDataset& d_r, const UnlearnConfig& config);

/// Ascend the cross-entropy of D_f.
ParamSet gradient_ascent(const Mlp& net, const ParamSet& theta_o,
                         const LabeledDataset& d_f, const UnlearnConfig& config);

/// Minimise L(D_r) - beta' L(D_f) over all parameters; one forget batch (from
/// an independently shuffled cycle) per retain batch.
ParamSet neggrad_plus(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                      const LabeledDataset& d_r, const UnlearnConfig& config);

struct TaskVectorResult {
  ParamSet theta_u;
  ParamSet theta_ft;  // theta_o fine-tuned on D_f
  ParamSet tau;       // theta_ft - theta_o
};

/// theta_u = theta_o - alpha * (theta_ft - theta_o).
ParamSet negate_task_vector(const ParamSet& theta_o, const ParamSet& tau, double alpha);

/// Fine-tunes on D_f for `tv_epochs` and applies the negated task vector.
TaskVectorResult negtv(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                       const UnlearnConfig& config);

/// Element mask of the top `fraction` of |grad L(D_f; theta_o)|, ties to the
/// lower flat index.
ElementMask saliency_mask(const Mlp& net, const ParamSet& theta_o,
                          const LabeledDataset& d_f, double fraction);

/// Simplified SalUn: random-label training restricted to salient elements.
ParamSet salun_lite(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                    const LabeledDataset& d_r, const UnlearnConfig& config);

/// How far the negated task vector moves predictions on retained data.
struct EntanglementReport {
  double alpha = 0.0;
  double mean_logit_l2 = 0.0;
  double max_logit_l2 = 0.0;
  double flip_rate = 0.0;
};

EntanglementReport entanglement_probe(const Mlp& net, const ParamSet& theta_o,
                                      const ParamSet& tau, double alpha,
                                      const LabeledDataset& d_r);

}  // namespace mcu

#endif  // MCULAB_BASELINES_HPP_
