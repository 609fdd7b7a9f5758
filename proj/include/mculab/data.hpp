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

#ifndef MCULAB_DATA_HPP_
#define MCULAB_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "mculab/dataset.hpp"

namespace mcu {

enum class GeneratorKind { kBlobs, kMoons };

std::string_view to_string(GeneratorKind k);
GeneratorKind parse_generator(std::string_view s);

/// Synthetic dataset recipe.
///
/// Blobs: class k is an isotropic Gaussian of stddev `noise` around a center
/// on the circle of radius `radius` (first two coordinates) at angle
/// 2*pi*k/K. Sample i gets label i mod K before the rows are shuffled, so
/// class sizes differ by at most one.
///
/// Moons: the usual interleaved half circles with Gaussian jitter `noise`;
/// always two classes.
struct DatasetSpec {
  GeneratorKind kind = GeneratorKind::kBlobs;
  std::size_t size = 0;
  double noise = 1.0;
  int class_count = 4;
  std::size_t dim = 2;
  double radius = 3.0;

  void validate() const;
};

LabeledDataset make_dataset(const DatasetSpec& spec, std::uint64_t seed);

/// Rounds half away from zero.
std::size_t round_count(double x);

/// Disjoint partition of a dataset, with the source row indices of each side
/// (ascending).
struct Partition {
  LabeledDataset first;
  LabeledDataset second;
  std::vector<std::size_t> first_rows;
  std::vector<std::size_t> second_rows;
};

/// first = D_f with round(ratio*n) rows drawn uniformly without replacement
/// (or per class when `stratified`), second = D_r.
Partition split_random_forgetting(const LabeledDataset& train, double ratio,
                                  std::uint64_t seed, bool stratified = false);

/// first = D_v with round(frac*n) rows, second = D_t.
Partition split_validation(const LabeledDataset& pool, double frac,
                           std::uint64_t seed);

/// Class-wise forgetting fragment.
struct ClasswiseSplit {
  LabeledDataset d_f;   // all train rows of the class
  LabeledDataset d_r;
  LabeledDataset d_tf;  // all test rows of the class
  LabeledDataset d_tr;
};

ClasswiseSplit split_classwise(const LabeledDataset& train,
                               const LabeledDataset& test_pool, int forget_class);

/// round(proportion*n) rows of `retain`, uniform without replacement, in
/// source order. proportion 1 returns `retain` unchanged.
LabeledDataset subsample_retain(const LabeledDataset& retain, double proportion,
                                std::uint64_t seed);

/// Every split the experiments use.
struct DataSplits {
  LabeledDataset d_train;
  LabeledDataset d_f;
  LabeledDataset d_r;
  LabeledDataset d_v;
  LabeledDataset d_t;
  std::optional<LabeledDataset> d_tf;
  std::optional<LabeledDataset> d_tr;

  bool classwise() const { return d_tf.has_value(); }
};

// CSV with header f0,...,f<d-1>,label; doubles printed with 17 significant
// digits so the text round trip is exact.
void save_csv(const std::filesystem::path& path, const LabeledDataset& data);
LabeledDataset load_csv(const std::filesystem::path& path, int class_count);

}  // namespace mcu

#endif  // MCULAB_DATA_HPP_
