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

#include "mculab/errors.hpp"

#include <cmath>

namespace mcu {

StageError::StageError(std::string stage, Kind kind, const std::string& what)
    : std::runtime_error("[stage " + stage + "] " + what),
      stage_(std::move(stage)),
      kind_(kind) {}

void check_loss(double loss, const char* where) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string(where) + ": non-finite loss");
  }
  if (std::abs(loss) > kDivergenceThreshold) {
    throw NumericError(std::string(where) + ": loss " + std::to_string(loss) +
                       " exceeds divergence threshold");
  }
}

}  // namespace mcu
