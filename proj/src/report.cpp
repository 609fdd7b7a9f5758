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

#include "mculab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mculab/errors.hpp"

namespace mcu {

namespace fs = std::filesystem;

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string percent(double fraction) { return fixed2(100.0 * fraction); }

std::string interval_text(const Interval& i) {
  return std::string(i.lo_closed ? "[" : "(") + fixed4(i.lo) + ", " + fixed4(i.hi) +
         (i.hi_closed ? "]" : ")");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_cell(double value, std::optional<double> gap) {
  std::string s = percent(value);
  if (gap) s += " (" + percent(*gap) + ")";
  return s;
}

std::string render_summary(const ResultsBundle& b) {
  const bool classwise = b.scenario == "classwise";
  const MetricsReport* rt = b.rt();
  std::ostringstream os;
  os << "# Unlearning results\n\n";
  os << "- scenario: " << b.scenario << "\n";
  os << "- architecture: " << b.architecture << "\n";
  os << "- seed: " << b.seed << "\n";
  os << "- config hash: " << b.config_hash << "\n";
  os << "- reference accuracies: train " << percent(b.refs.acc_train_o) << ", validation "
     << percent(b.refs.acc_v_o) << "\n\n";

  os << "| Methods | UA |" << (classwise ? " UA_test |" : "")
     << " RA | TA | MIA | Avg. Gap | RTE (s) |\n";
  os << "|---|---|" << (classwise ? "---|" : "") << "---|---|---|---|---|\n";
  for (const auto& m : b.methods) {
    std::optional<MetricGaps> g;
    if (rt != nullptr) g = gaps(m, rt);
    auto gap_of = [&](double MetricGaps::*field) -> std::optional<double> {
      if (!g) return std::nullopt;
      return (*g).*field;
    };
    os << "| " << m.method << " | " << format_cell(m.ua, gap_of(&MetricGaps::ua)) << " |";
    if (classwise) {
      os << ' '
         << (m.ua_test ? format_cell(*m.ua_test, g ? g->ua_test : std::nullopt) : "-")
         << " |";
    }
    os << ' ' << format_cell(m.ra, gap_of(&MetricGaps::ra)) << " | "
       << format_cell(m.ta, gap_of(&MetricGaps::ta)) << " | "
       << format_cell(m.mia, gap_of(&MetricGaps::mia)) << " | "
       << (g ? percent(g->avg_gap) : "-") << " | " << fixed2(m.rte_seconds) << " |\n";
  }
  os << "\nValues in percent; gaps to RT in parentheses. Avg. Gap averages the UA, RA, "
        "TA and MIA gaps.\nRTE counts only the unlearning stage; for MCU it adds curve "
        "work to the pre-unlearning run.\n";

  if (b.optimal) {
    const OptimalSummary& o = *b.optimal;
    os << "\n## Pathway\n\n";
    os << "- pre-unlearning method: " << b.pre_method << "\n";
    os << "- optimal t: " << fixed4(o.t_star) << " (fitted gap " << fixed4(o.fitted_gap)
       << ", measured gap " << fixed4(o.measured_gap) << ")\n";
    os << "- alignment gap at t = 1: " << fixed4(o.endpoint_gap) << "\n";
    os << "- effective region: ";
    if (b.region.empty()) {
      os << "empty";
    } else {
      for (std::size_t i = 0; i < b.region.size(); ++i) {
        if (i > 0) os << " U ";
        os << interval_text(b.region[i]);
      }
    }
    os << "\n";
    if (b.curve) {
      const CurveSummary& c = *b.curve;
      os << "- mask: " << c.mask_selected << " of " << c.tensor_count
         << " tensors trained (digest " << c.mask_digest << ")\n";
      os << "- curve steps: " << c.steps;
      if (c.beta_fixed > 0) {
        os << ", fixed beta";
      } else {
        os << ", beta 0 / 0.1 / 0.5 on " << c.beta_zero << " / " << c.beta_mild << " / "
           << c.beta_strong << " batches";
      }
      os << "\n";
    }
  }
  return os.str();
}

void emit_report(const ResultsBundle& b, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create report directory " + dir.string());
  }
  write_file(dir / "summary.md", render_summary(b));
  write_file(dir / "metrics.csv", metrics_csv(b.methods, b.rt()));
  write_file(dir / "profile.csv", profile_csv(b.profile));
  write_file(dir / "bundle.json", b.to_json());
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b.timings) t[k] = v;
  write_file(dir / "timings.json", t.dump(2) + "\n");
}

}  // namespace mcu
