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

#ifndef MCULAB_EVAL_HPP_
#define MCULAB_EVAL_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mculab/data.hpp"
#include "mculab/interp.hpp"
#include "mculab/nn.hpp"
#include "mculab/pathway.hpp"
#include "mculab/reference.hpp"

namespace mcu {

// ---------------------------------------------------------------------------
// Membership inference

struct MiaResult {
  double score = 0.0;      // fraction of D_f judged non-member
  double threshold = 0.0;  // member iff confidence >= threshold
  double balanced_accuracy = 0.5;
  bool degenerate = false;  // no significant signal; median used
};

/// Softmax probability of each row's true label.
std::vector<double> true_label_confidence(const Mlp& net, const ParamSet& params,
                                          const LabeledDataset& data);

/// Significance level of the calibration check below.
inline constexpr double kMiaSignificance = 0.05;

/// One-sided two-sample KS critical value sqrt(-ln(a)/2) sqrt((n+m)/(nm)).
double ks_critical(std::size_t n_members, std::size_t n_non_members);

/// Calibrates the threshold on members vs non-members (balanced accuracy,
/// lowest threshold among ties, candidates = observed values and +inf) and
/// scores the forget confidences. Calibration is degenerate, and the pooled
/// median is used instead, when the best gain over chance is not significant
/// under ks_critical.
MiaResult mia_from_confidences(const std::vector<double>& members,
                               const std::vector<double>& non_members,
                               const std::vector<double>& forget);

/// Members are D_r, non-members D_t.
MiaResult mia(const Mlp& net, const ParamSet& params, const LabeledDataset& d_f,
              const LabeledDataset& d_r, const LabeledDataset& d_t);

// ---------------------------------------------------------------------------
// Metrics

struct MetricsReport {
  std::string method;
  double ua = 0.0;  // 1 - acc(D_f)
  double ra = 0.0;  // acc(D_r)
  double ta = 0.0;  // acc(D_t); acc(D_tr) in class-wise runs
  double mia = 0.0;
  std::optional<double> ua_test;  // 1 - acc(D_tf), class-wise only
  double rte_seconds = 0.0;  // not serialised here; see Timings
  double mia_threshold = 0.0;
  bool mia_degenerate = false;

  bool operator==(const MetricsReport&) const = default;
};

struct MetricGaps {
  double ua = 0.0;
  double ra = 0.0;
  double ta = 0.0;
  double mia = 0.0;
  std::optional<double> ua_test;
  double avg_gap = 0.0;   // mean over UA, RA, TA, MIA (used in tables)
  double avg_gap3 = 0.0;  // mean over UA, RA, TA
};

MetricsReport metrics(const Mlp& net, const ParamSet& params, const DataSplits& splits,
                      std::string method = {});

/// Per-metric |report - rt|. Throws ConfigError when rt is null.
MetricGaps gaps(const MetricsReport& report, const MetricsReport* rt);

double average_gap(double ua, double ra, double ta, double mia);

// ---------------------------------------------------------------------------
// Alignment along the pathway

struct PointAccuracies {
  double acc_f = 0.0;
  double acc_r = 0.0;
  double acc_t = 0.0;  // on D_tr in class-wise runs
  std::optional<double> acc_tf;

  bool all_finite() const;
  bool operator==(const PointAccuracies&) const = default;
};

PointAccuracies point_accuracies(const Mlp& net, const ParamSet& params,
                                 const DataSplits& splits);

/// mean(|acc_f - acc_v_o|, |acc_r - acc_train_o|, |acc_t - acc_v_o|).
double alignment_gap(double acc_f, double acc_r, double acc_t,
                     const ReferenceAccuracies& refs);

/// Random forgetting: the three-term gap above. Class-wise (acc_tf set): the
/// forget target becomes 0 and |acc_tf - 0| joins as a fourth term.
double alignment_gap(const PointAccuracies& acc, const ReferenceAccuracies& refs);

struct ProfilePoint {
  double t = 0.0;
  PointAccuracies acc;
  double gap = 0.0;
};

struct PathProfile {
  std::vector<ProfilePoint> points;

  std::vector<double> ts() const;
  std::vector<double> gaps() const;
  /// Natural cubic interpolant of the gap over t.
  NaturalCubicSpline fitted_gap() const;
};

/// n >= 2 positions t_j = j / (n - 1).
PathProfile path_profile(const Mlp& net, const BezierCurve& curve,
                         const DataSplits& splits, const ReferenceAccuracies& refs,
                         std::size_t n = 20);

inline constexpr std::array<double, 3> kOptimalSampleT = {0.75, 0.875, 1.0};

struct OptimalChoice {
  double t = 1.0;
  double fitted_gap = 0.0;
  Quadratic fit;
};

/// Minimiser of the quadratic through three (t, gap) samples, clamped to
/// [t0, t2]. Throws NumericError on non-finite gaps.
OptimalChoice choose_optimal_t(const std::array<double, 3>& t,
                               const std::array<double, 3>& gap);

struct OptimalModel {
  OptimalChoice choice;
  std::array<double, 3> sample_gaps{};
  double measured_gap = 0.0;  // alignment gap actually observed at t*
  PointAccuracies acc;
  ParamSet params;
};

OptimalModel find_optimal_t(const Mlp& net, const BezierCurve& curve,
                            const DataSplits& splits, const ReferenceAccuracies& refs);

struct EffectiveRegion {
  std::vector<Interval> intervals;
  double endpoint_gap = 0.0;  // gap at t = 1
  PathProfile profile;        // the 20 samples the region was fitted to

  bool empty() const { return intervals.empty(); }
  bool contains(double t) const;
  double measure() const;
};

/// {t : spline(t) < gap(1)} from a profile whose last point is t = 1.
std::vector<Interval> region_from_profile(const PathProfile& profile);

EffectiveRegion effective_region(const Mlp& net, const BezierCurve& curve,
                                 const DataSplits& splits,
                                 const ReferenceAccuracies& refs);

inline constexpr std::size_t kRegionSamples = 20;

// ---------------------------------------------------------------------------
// Serialisation. CSV columns are fixed:
//   profile: t,acc_f,acc_r,acc_t,acc_tf,gap
//   metrics: method,ua,ra,ta,mia,ua_test,gap_ua,gap_ra,gap_ta,gap_mia,
//            avg_gap,avg_gap3
// Missing optional values are empty cells. Wall-clock RTE is deliberately
// left out so these outputs are reproducible byte for byte.

std::string profile_csv(const PathProfile& profile);
std::string metrics_csv(const std::vector<MetricsReport>& reports,
                        const MetricsReport* rt);
std::string profile_json(const PathProfile& profile);
std::string metrics_json(const MetricsReport& report, const MetricsReport* rt);

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

}  // namespace mcu

#endif  // MCULAB_EVAL_HPP_
