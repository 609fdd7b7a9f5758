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

#ifndef MCULAB_BATCHING_HPP_
#define MCULAB_BATCHING_HPP_

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mculab/rng.hpp"

namespace mcu {

/// Shuffled row indices of one epoch, cut into batches (last one may be short).
inline std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                           std::size_t batch_size,
                                                           Rng& rng) {
  const auto perm = rng.permutation(n);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                     perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

/// Endless stream of batches over n rows; reshuffles whenever a pass is
/// exhausted. Batches never straddle two passes.
class CyclicBatches {
 public:
  CyclicBatches(std::size_t n, std::size_t batch_size, Rng rng)
      : n_(n), batch_size_(std::min(batch_size, n)), rng_(rng) {}

  std::vector<std::size_t> next() {
    if (pos_ >= order_.size()) {
      order_ = rng_.permutation(n_);
      pos_ = 0;
    }
    const std::size_t end = std::min(order_.size(), pos_ + batch_size_);
    std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 order_.begin() + static_cast<std::ptrdiff_t>(end));
    pos_ = end;
    return out;
  }

 private:
  std::size_t n_;
  std::size_t batch_size_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

}  // namespace mcu

#endif  // MCULAB_BATCHING_HPP_
