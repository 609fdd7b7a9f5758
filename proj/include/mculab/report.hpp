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

#ifndef MCULAB_REPORT_HPP_
#define MCULAB_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "mculab/experiment.hpp"

namespace mcu {

/// "a (b)" with both values in percent to two decimals; "a" alone when the
/// gap is absent.
std::string format_cell(double value, std::optional<double> gap);

/// Markdown summary: one row per method with UA, [UA_test,] RA, TA, MIA,
/// Avg. Gap and RTE (seconds), followed by the pathway results.
std::string render_summary(const ResultsBundle& bundle);

/// Writes summary.md, metrics.csv, profile.csv, bundle.json and
/// timings.json into `dir`. Throws IoError when the directory is unwritable.
void emit_report(const ResultsBundle& bundle, const std::filesystem::path& dir);

}  // namespace mcu

#endif  // MCULAB_REPORT_HPP_
