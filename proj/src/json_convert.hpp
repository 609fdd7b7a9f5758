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

// Private JSON helpers shared by the eval, experiment and report sources.

#ifndef MCULAB_SRC_JSON_CONVERT_HPP_
#define MCULAB_SRC_JSON_CONVERT_HPP_

#include <cmath>
#include <optional>

#include "json.hpp"
#include "mculab/eval.hpp"

namespace mcu::detail {

using Json = nlohmann::ordered_json;

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json optional_number(const std::optional<double>& v) {
  return v ? number_or_null(*v) : Json(nullptr);
}

Json to_json(const MetricsReport& r, const MetricsReport* rt);
Json to_json(const PathProfile& p);
Json to_json(const Interval& i);

MetricsReport metrics_from_json(const Json& j);
PathProfile profile_from_json(const Json& j);
Interval interval_from_json(const Json& j);

}  // namespace mcu::detail

#endif  // MCULAB_SRC_JSON_CONVERT_HPP_
