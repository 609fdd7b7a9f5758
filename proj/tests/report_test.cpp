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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mculab/errors.hpp"
#include "mculab/report.hpp"
#include "test_util.hpp"

namespace mcu {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MetricsReport row(std::string name, double ua, double ra, double ta, double mia,
                  double rte) {
  MetricsReport r;
  r.method = std::move(name);
  r.ua = ua;
  r.ra = ra;
  r.ta = ta;
  r.mia = mia;
  r.rte_seconds = rte;
  return r;
}

ResultsBundle fixture_bundle() {
  ResultsBundle b;
  b.scenario = "random";
  b.architecture = "2-64-64-4 relu";
  b.seed = 7;
  b.config_hash = "abcdef0123456789";
  b.refs = {0.98, 0.90};
  b.pre_method = "NegGrad+";
  b.methods = {row("Original", 0.02, 0.98, 0.90, 0.05, 0.0),
               row("RT", 0.10, 0.97, 0.89, 0.15, 1.5),
               row("NegGrad+", 0.08, 0.95, 0.88, 0.10, 0.25),
               row("MCU", 0.09, 0.96, 0.89, 0.14, 0.5)};
  OptimalSummary o;
  o.t_star = 0.8125;
  o.fitted_gap = 0.0123;
  o.measured_gap = 0.015;
  o.endpoint_gap = 0.02;
  b.optimal = o;
  b.region = {{0.0, 0.1, true, false}, {0.5, 1.0, false, false}};
  CurveSummary c;
  c.mask_selected = 3;
  c.tensor_count = 6;
  c.mask_digest = "d1g";
  c.steps = 80;
  c.beta_zero = 10;
  c.beta_mild = 20;
  c.beta_strong = 50;
  b.curve = c;
  return b;
}

TEST(FormatCell, ValueAndGapInPercent) {
  EXPECT_EQ(format_cell(0.8946, 0.0025), "89.46 (0.25)");
  EXPECT_EQ(format_cell(1.0, std::nullopt), "100.00");
  EXPECT_EQ(format_cell(0.0, 0.0), "0.00 (0.00)");
}

TEST(RenderSummary, MatchesGoldenFile) {
  EXPECT_EQ(render_summary(fixture_bundle()),
            slurp(testing::golden_dir() / "summary_random.md"));
}

TEST(RenderSummary, EmptyBundleIsHeaderOnlyTable) {
  ResultsBundle b;
  b.scenario = "random";
  const auto md = render_summary(b);
  EXPECT_NE(md.find("| Methods | UA | RA | TA | MIA | Avg. Gap | RTE (s) |\n"
                    "|---|---|---|---|---|---|---|\n\n"),
            std::string::npos);
  EXPECT_EQ(md.find("## Pathway"), std::string::npos);
}

TEST(RenderSummary, ClasswiseAddsTestForgetColumn) {
  ResultsBundle b;
  b.scenario = "classwise";
  auto rt = row("RT", 1.0, 0.99, 0.95, 0.9, 1.0);
  rt.ua_test = 1.0;
  auto mcu = row("MCU", 1.0, 0.98, 0.95, 0.8, 0.5);
  mcu.ua_test = 0.96;
  b.methods = {rt, mcu, row("Other", 0.5, 0.5, 0.5, 0.5, 0.0)};
  const auto md = render_summary(b);
  EXPECT_NE(md.find("| Methods | UA | UA_test | RA |"), std::string::npos);
  EXPECT_NE(md.find("| MCU | 100.00 (0.00) | 96.00 (4.00) | 98.00 (1.00) |"),
            std::string::npos);
  EXPECT_NE(md.find("| Other | 50.00 (50.00) | - |"), std::string::npos);
}

TEST(EmitReport, WritesStableFileSet) {
  const auto dir = testing::scratch_dir("report") / "nested";
  auto b = fixture_bundle();
  b.timings = {{"curve", 0.5}, {"unlearn", 0.25}};
  emit_report(b, dir);
  for (const char* f : {"summary.md", "metrics.csv", "profile.csv", "bundle.json",
                        "timings.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "summary.md"), render_summary(b));
  const auto t = nlohmann::json::parse(slurp(dir / "timings.json"));
  EXPECT_EQ(t["curve"], 0.5);
  const auto bundle = slurp(dir / "bundle.json");
  EXPECT_EQ(bundle.find("timings"), std::string::npos);
  EXPECT_EQ(ResultsBundle::from_json(bundle).to_json(), bundle);
}

TEST(EmitReport, UnwritableDirectoryIsIoError) {
  const auto dir = testing::scratch_dir("report_bad");
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(emit_report(fixture_bundle(), dir / "file" / "sub"), IoError);
}

}  // namespace
}  // namespace mcu
