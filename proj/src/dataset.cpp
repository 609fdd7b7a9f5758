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

#include "mculab/dataset.hpp"

#include <algorithm>
#include <string>

#include "mculab/errors.hpp"

namespace mcu {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ConfigError("matrix data size " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(rows_) + "x" +
                      std::to_string(cols_));
  }
}

Matrix Matrix::gather_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void LabeledDataset::validate() const {
  if (features.rows() != labels.size()) {
    throw InvalidInputError("dataset has " + std::to_string(features.rows()) +
                            " feature rows but " +
                            std::to_string(labels.size()) + " labels");
  }
  if (class_count <= 0) {
    throw InvalidInputError("dataset class_count must be positive");
  }
  for (int y : labels) {
    if (y < 0 || y >= class_count) {
      throw InvalidInputError("label " + std::to_string(y) +
                              " out of range for " +
                              std::to_string(class_count) + " classes");
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features = features.gather_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  out.class_count = class_count;
  return out;
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.feature_dim() != b.feature_dim() || a.class_count != b.class_count) {
    throw ConfigError("cannot concatenate datasets of different layout");
  }
  std::vector<double> data = a.features.data();
  data.insert(data.end(), b.features.data().begin(), b.features.data().end());
  LabeledDataset out;
  out.features = Matrix(a.size() + b.size(), a.feature_dim(), std::move(data));
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.class_count = a.class_count;
  return out;
}

}  // namespace mcu
