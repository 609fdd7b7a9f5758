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

#ifndef MCULAB_RNG_HPP_
#define MCULAB_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mcu {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64's raw output is fixed by the standard, but the standard
/// distributions are not, so every draw here is derived from raw 64-bit words.
/// Sub-streams are derived from a root seed and a stream name, which lets one
/// component be swapped without perturbing the randomness of the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream keyed by (root, name).
  static Rng stream(std::uint64_t root, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  /// 0..n-1 in random order.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; used for seed derivation and hashing.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over a byte string.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mcu

#endif  // MCULAB_RNG_HPP_
