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

#ifndef MCULAB_REFERENCE_HPP_
#define MCULAB_REFERENCE_HPP_

namespace mcu {

/// Accuracies of the original model, recorded once after original training
/// and treated as constants afterwards.
struct ReferenceAccuracies {
  double acc_train_o = 0.0;  // on D_train
  double acc_v_o = 0.0;      // on D_v

  /// Throws InvalidInputError unless both lie in (0, 1].
  void validate() const;

  bool operator==(const ReferenceAccuracies&) const = default;
};

}  // namespace mcu

#endif  // MCULAB_REFERENCE_HPP_
