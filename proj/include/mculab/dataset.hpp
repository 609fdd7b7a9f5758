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

#ifndef MCULAB_DATASET_HPP_
#define MCULAB_DATASET_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mculab/matrix.hpp"

namespace mcu {

/// Feature rows with integer class labels.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t feature_dim() const { return features.cols(); }
  bool empty() const { return labels.empty(); }

  /// Throws InvalidInputError when rows/labels disagree or a label is out of
  /// range.
  void validate() const;

  LabeledDataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const LabeledDataset&) const = default;
};

/// Rows of `a` followed by rows of `b`.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

}  // namespace mcu

#endif  // MCULAB_DATASET_HPP_
