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

#ifndef MCULAB_MASK_HPP_
#define MCULAB_MASK_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "mculab/dataset.hpp"
#include "mculab/nn.hpp"

namespace mcu {

/// Per-tensor importance ||grad_i||_2 / |theta_i| of a mean loss.
struct ImportanceScores {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Scores from the full-dataset mean cross-entropy gradient at `params`,
/// accumulated over fixed-size batches in order.
ImportanceScores importance(const Mlp& net, const ParamSet& params,
                            const LabeledDataset& data, std::size_t batch_size = 512);

/// Scores straight from a gradient.
ImportanceScores importance_from_grads(const Gradients& grads);

/// Number of tensors a fraction selects: ceil(fraction * total), with a
/// 1e-9 guard so that e.g. 0.1 * 30 selects 3, not 4.
std::size_t selection_count(double fraction, std::size_t total);

/// Indices of the `count` highest scores; ties go to the lower index.
std::vector<std::size_t> top_tensors(const std::vector<double>& scores,
                                     std::size_t count);

/// One side of the mask: which tensors a ranking selected.
struct Selection {
  TensorMask bits;
  double fraction = 0.0;
  std::size_t count = 0;
  /// Score of the last (lowest-ranked) selected tensor; +inf when none.
  double threshold = 0.0;
};

/// m_r: the selection_count(k_r) most retain-important tensors are excluded
/// (bit 0), every other tensor keeps bit 1. `bits` holds m_r itself.
Selection filter_mask(const ImportanceScores& scores_r, double k_r);

/// m_f: the selection_count(k) most forget-important tensors get bit 1.
Selection reserve_mask(const ImportanceScores& scores_f, double k);

/// m = m_r AND m_f. Throws ConfigError on layout mismatch.
TensorMask combine(const TensorMask& m_r, const TensorMask& m_f);

/// Rebuilds a ranking selection from its stored threshold: every score above
/// the threshold, then ties at the threshold by ascending index, up to
/// `count` tensors.
std::vector<bool> select_by_threshold(const std::vector<double>& scores,
                                      double threshold, std::size_t count);

/// Frozen whole-tensor mask with its provenance.
struct ParameterMask {
  TensorMask bits;
  Selection filter;   // m_r
  Selection reserve;  // m_f
  ImportanceScores scores_r;
  ImportanceScores scores_f;

  /// Stable hex digest of the bits and thresholds.
  std::string digest() const;
  /// JSON: k, k_r, gamma values and a list of (tensor_name, bit, score_r,
  /// score_f).
  std::string to_json() const;
};

/// Filter on D_r, reserve on D_f, AND them (mask computed once at theta_o).
ParameterMask build_mask(const Mlp& net, const ParamSet& theta_o,
                         const LabeledDataset& d_r, const LabeledDataset& d_f,
                         double k, double k_r);

/// All-ones mask with no ranking (every tensor trainable).
ParameterMask full_mask(const ParamSet& like);

}  // namespace mcu

#endif  // MCULAB_MASK_HPP_
