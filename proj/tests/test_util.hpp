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

#ifndef MCULAB_TESTS_TEST_UTIL_HPP_
#define MCULAB_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mculab/dataset.hpp"
#include "mculab/nn.hpp"
#include "mculab/rng.hpp"

namespace mcu::testing {

inline std::filesystem::path golden_dir() { return MCULAB_GOLDEN_DIR; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mculab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Every value drawn from N(0, scale^2).
inline ParamSet random_like(const ParamSet& like, Rng& rng, double scale = 1.0) {
  ParamSet out = like;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (auto& v : out[i].values) v = scale * rng.normal();
  }
  return out;
}

inline LabeledDataset random_dataset(std::size_t n, std::size_t dim, int classes,
                                     Rng& rng) {
  LabeledDataset d;
  d.features = Matrix(n, dim);
  d.class_count = classes;
  for (auto& v : d.features.data()) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    d.labels.push_back(static_cast<int>(rng.below(static_cast<std::size_t>(classes))));
  }
  return d;
}

/// |a - b| / max(|a|, |b|, floor).
inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace mcu::testing

#endif  // MCULAB_TESTS_TEST_UTIL_HPP_
