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

#ifndef MCULAB_ERRORS_HPP_
#define MCULAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mcu {

/// Malformed configuration, layout mismatch or missing upstream artifact.
/// Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates an operation precondition (empty batch, bad ratio, ...).
/// Also reported with exit code 2.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Non-finite values or divergence. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem read/write failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Wraps an error raised inside a named pipeline stage.
class StageError : public std::runtime_error {
 public:
  enum class Kind { kConfig, kNumeric, kOther };

  StageError(std::string stage, Kind kind, const std::string& what);

  const std::string& stage() const { return stage_; }
  Kind kind() const { return kind_; }

 private:
  std::string stage_;
  Kind kind_;
};

/// Loss magnitude above which training is aborted as divergent.
inline constexpr double kDivergenceThreshold = 1e6;

/// Throws NumericError if `loss` is non-finite or exceeds the divergence
/// threshold in magnitude.
void check_loss(double loss, const char* where);

}  // namespace mcu

#endif  // MCULAB_ERRORS_HPP_
