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

#include "mculab/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "json_convert.hpp"
#include "mculab/errors.hpp"

namespace mcu {

std::vector<double> true_label_confidence(const Mlp& net, const ParamSet& params,
                                          const LabeledDataset& data) {
  const Matrix probs = softmax(net.forward(params, data.features));
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = probs(i, static_cast<std::size_t>(data.labels[i]));
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

double ks_critical(std::size_t n_members, std::size_t n_non_members) {
  const double n = static_cast<double>(n_members), m = static_cast<double>(n_non_members);
  return std::sqrt(-std::log(kMiaSignificance) / 2.0) * std::sqrt((n + m) / (n * m));
}

MiaResult mia_from_confidences(const std::vector<double>& members,
                               const std::vector<double>& non_members,
                               const std::vector<double>& forget) {
  if (members.empty() || non_members.empty() || forget.empty()) {
    throw InvalidInputError("membership inference needs non-empty splits");
  }
  std::vector<double> m = members;
  std::vector<double> nm = non_members;
  std::sort(m.begin(), m.end());
  std::sort(nm.begin(), nm.end());
  std::vector<double> candidates = m;
  candidates.insert(candidates.end(), nm.begin(), nm.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  // Balanced accuracy compared exactly as tp * |nm| + tn * |m|.
  const auto n_m = static_cast<std::uint64_t>(m.size());
  const auto n_nm = static_cast<std::uint64_t>(nm.size());
  std::uint64_t best_score = 0;
  double best_tau = candidates.front();
  for (double tau : candidates) {
    const auto tp = static_cast<std::uint64_t>(
        m.end() - std::lower_bound(m.begin(), m.end(), tau));
    const auto tn = static_cast<std::uint64_t>(
        std::lower_bound(nm.begin(), nm.end(), tau) - nm.begin());
    const std::uint64_t score = tp * n_nm + tn * n_m;
    if (score > best_score) {
      best_score = score;
      best_tau = tau;
    }
  }

  MiaResult out;
  out.balanced_accuracy =
      static_cast<double>(best_score) / (2.0 * static_cast<double>(n_m * n_nm));
  // The best balanced-accuracy gain over chance equals half the one-sided
  // two-sample KS statistic D+. When D+ is not significant the two
  // confidence samples are treated as one distribution.
  const double d_plus =
      static_cast<double>(best_score) / static_cast<double>(n_m * n_nm) - 1.0;
  if (best_score <= n_m * n_nm || d_plus <= ks_critical(m.size(), nm.size())) {
    std::vector<double> pooled = m;
    pooled.insert(pooled.end(), nm.begin(), nm.end());
    out.threshold = median(std::move(pooled));
    out.degenerate = true;
  } else {
    out.threshold = best_tau;
  }
  std::size_t non_member = 0;
  for (double c : forget) {
    if (!(c >= out.threshold)) ++non_member;
  }
  out.score = static_cast<double>(non_member) / static_cast<double>(forget.size());
  return out;
}

MiaResult mia(const Mlp& net, const ParamSet& params, const LabeledDataset& d_f,
              const LabeledDataset& d_r, const LabeledDataset& d_t) {
  return mia_from_confidences(true_label_confidence(net, params, d_r),
                              true_label_confidence(net, params, d_t),
                              true_label_confidence(net, params, d_f));
}

MetricsReport metrics(const Mlp& net, const ParamSet& params, const DataSplits& splits,
                      std::string method) {
  if (splits.d_f.empty() || splits.d_r.empty() || splits.d_t.empty()) {
    throw InvalidInputError("metrics need non-empty D_f, D_r and D_t");
  }
  MetricsReport r;
  r.method = std::move(method);
  r.ua = 1.0 - net.accuracy(params, splits.d_f);
  r.ra = net.accuracy(params, splits.d_r);
  r.ta = net.accuracy(params, splits.classwise() ? *splits.d_tr : splits.d_t);
  if (splits.classwise()) r.ua_test = 1.0 - net.accuracy(params, *splits.d_tf);
  const MiaResult m = mia(net, params, splits.d_f, splits.d_r, splits.d_t);
  r.mia = m.score;
  r.mia_threshold = m.threshold;
  r.mia_degenerate = m.degenerate;
  return r;
}

double average_gap(double ua, double ra, double ta, double mia) {
  return (ua + ra + ta + mia) / 4.0;
}

MetricGaps gaps(const MetricsReport& report, const MetricsReport* rt) {
  if (rt == nullptr) throw ConfigError("gaps requested without an RT report");
  MetricGaps g;
  g.ua = std::abs(report.ua - rt->ua);
  g.ra = std::abs(report.ra - rt->ra);
  g.ta = std::abs(report.ta - rt->ta);
  g.mia = std::abs(report.mia - rt->mia);
  if (report.ua_test && rt->ua_test) g.ua_test = std::abs(*report.ua_test - *rt->ua_test);
  g.avg_gap = average_gap(g.ua, g.ra, g.ta, g.mia);
  g.avg_gap3 = (g.ua + g.ra + g.ta) / 3.0;
  return g;
}

bool PointAccuracies::all_finite() const {
  return std::isfinite(acc_f) && std::isfinite(acc_r) && std::isfinite(acc_t) &&
         (!acc_tf || std::isfinite(*acc_tf));
}

PointAccuracies point_accuracies(const Mlp& net, const ParamSet& params,
                                 const DataSplits& splits) {
  PointAccuracies a;
  a.acc_f = net.accuracy(params, splits.d_f);
  a.acc_r = net.accuracy(params, splits.d_r);
  if (splits.classwise()) {
    a.acc_t = net.accuracy(params, *splits.d_tr);
    a.acc_tf = net.accuracy(params, *splits.d_tf);
  } else {
    a.acc_t = net.accuracy(params, splits.d_t);
  }
  return a;
}

double alignment_gap(double acc_f, double acc_r, double acc_t,
                     const ReferenceAccuracies& refs) {
  return (std::abs(acc_f - refs.acc_v_o) + std::abs(acc_r - refs.acc_train_o) +
          std::abs(acc_t - refs.acc_v_o)) /
         3.0;
}

double alignment_gap(const PointAccuracies& acc, const ReferenceAccuracies& refs) {
  if (!acc.acc_tf) return alignment_gap(acc.acc_f, acc.acc_r, acc.acc_t, refs);
  return (std::abs(acc.acc_f) + std::abs(acc.acc_r - refs.acc_train_o) +
          std::abs(acc.acc_t - refs.acc_v_o) + std::abs(*acc.acc_tf)) /
         4.0;
}

std::vector<double> PathProfile::ts() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.t);
  return out;
}

std::vector<double> PathProfile::gaps() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.gap);
  return out;
}

NaturalCubicSpline PathProfile::fitted_gap() const { return {ts(), gaps()}; }

PathProfile path_profile(const Mlp& net, const BezierCurve& curve,
                         const DataSplits& splits, const ReferenceAccuracies& refs,
                         std::size_t n) {
  if (n < 2) throw InvalidInputError("path profile needs at least two points");
  PathProfile profile;
  for (std::size_t j = 0; j < n; ++j) {
    ProfilePoint p;
    p.t = j + 1 == n ? 1.0 : static_cast<double>(j) / static_cast<double>(n - 1);
    p.acc = point_accuracies(net, bezier_point(curve, p.t), splits);
    p.gap = alignment_gap(p.acc, refs);
    profile.points.push_back(p);
  }
  return profile;
}

OptimalChoice choose_optimal_t(const std::array<double, 3>& t,
                               const std::array<double, 3>& gap) {
  for (double g : gap) {
    if (!std::isfinite(g)) throw NumericError("non-finite alignment gap");
  }
  OptimalChoice c;
  c.fit = fit_quadratic(t, gap);
  c.t = argmin_on_interval(c.fit, t[0], t[2]);
  c.fitted_gap = c.fit(c.t);
  return c;
}

OptimalModel find_optimal_t(const Mlp& net, const BezierCurve& curve,
                            const DataSplits& splits, const ReferenceAccuracies& refs) {
  OptimalModel out;
  for (std::size_t i = 0; i < 3; ++i) {
    const PointAccuracies a =
        point_accuracies(net, bezier_point(curve, kOptimalSampleT[i]), splits);
    if (!a.all_finite()) throw NumericError("non-finite accuracy on the curve");
    out.sample_gaps[i] = alignment_gap(a, refs);
  }
  out.choice = choose_optimal_t(kOptimalSampleT, out.sample_gaps);
  out.params = bezier_point(curve, out.choice.t);
  out.acc = point_accuracies(net, out.params, splits);
  out.measured_gap = alignment_gap(out.acc, refs);
  return out;
}

bool EffectiveRegion::contains(double t) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [t](const Interval& i) { return i.contains(t); });
}

double EffectiveRegion::measure() const {
  double total = 0.0;
  for (const auto& i : intervals) total += i.hi - i.lo;
  return total;
}

std::vector<Interval> region_from_profile(const PathProfile& profile) {
  if (profile.points.size() < 2 || profile.points.back().t != 1.0) {
    throw InvalidInputError("region needs a profile ending at t = 1");
  }
  return sublevel_intervals(profile.fitted_gap(), profile.points.back().gap);
}

EffectiveRegion effective_region(const Mlp& net, const BezierCurve& curve,
                                 const DataSplits& splits,
                                 const ReferenceAccuracies& refs) {
  EffectiveRegion r;
  r.profile = path_profile(net, curve, splits, refs, kRegionSamples);
  r.endpoint_gap = r.profile.points.back().gap;
  r.intervals = region_from_profile(r.profile);
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

std::string profile_csv(const PathProfile& profile) {
  std::ostringstream os;
  os << "t,acc_f,acc_r,acc_t,acc_tf,gap\n";
  for (const auto& p : profile.points) {
    os << format_number(p.t) << ',' << format_number(p.acc.acc_f) << ','
       << format_number(p.acc.acc_r) << ',' << format_number(p.acc.acc_t) << ','
       << cell(p.acc.acc_tf) << ',' << format_number(p.gap) << '\n';
  }
  return os.str();
}

std::string metrics_csv(const std::vector<MetricsReport>& reports,
                        const MetricsReport* rt) {
  std::ostringstream os;
  os << "method,ua,ra,ta,mia,ua_test,gap_ua,gap_ra,gap_ta,gap_mia,avg_gap,avg_gap3\n";
  for (const auto& r : reports) {
    os << r.method << ',' << format_number(r.ua) << ',' << format_number(r.ra) << ','
       << format_number(r.ta) << ',' << format_number(r.mia) << ',' << cell(r.ua_test);
    if (rt != nullptr) {
      const MetricGaps g = gaps(r, rt);
      os << ',' << format_number(g.ua) << ',' << format_number(g.ra) << ','
         << format_number(g.ta) << ',' << format_number(g.mia) << ','
         << format_number(g.avg_gap) << ',' << format_number(g.avg_gap3);
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string profile_json(const PathProfile& profile) {
  return detail::to_json(profile).dump(2);
}

std::string metrics_json(const MetricsReport& report, const MetricsReport* rt) {
  return detail::to_json(report, rt).dump(2);
}

namespace detail {

Json to_json(const MetricsReport& r, const MetricsReport* rt) {
  Json j;
  j["method"] = r.method;
  j["ua"] = r.ua;
  j["ra"] = r.ra;
  j["ta"] = r.ta;
  j["mia"] = r.mia;
  j["ua_test"] = optional_number(r.ua_test);
  j["mia_threshold"] = number_or_null(r.mia_threshold);
  j["mia_degenerate"] = r.mia_degenerate;
  if (rt != nullptr) {
    const MetricGaps g = gaps(r, rt);
    j["gaps"] = {{"ua", g.ua},           {"ra", g.ra},
                 {"ta", g.ta},           {"mia", g.mia},
                 {"ua_test", optional_number(g.ua_test)},
                 {"avg_gap", g.avg_gap}, {"avg_gap3", g.avg_gap3}};
  }
  return j;
}

Json to_json(const PathProfile& p) {
  Json arr = Json::array();
  for (const auto& pt : p.points) {
    arr.push_back({{"t", pt.t},
                   {"acc_f", pt.acc.acc_f},
                   {"acc_r", pt.acc.acc_r},
                   {"acc_t", pt.acc.acc_t},
                   {"acc_tf", optional_number(pt.acc.acc_tf)},
                   {"gap", pt.gap}});
  }
  return arr;
}

Json to_json(const Interval& i) {
  return {{"lo", i.lo}, {"hi", i.hi}, {"lo_closed", i.lo_closed}, {"hi_closed", i.hi_closed}};
}

namespace {

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

double read_number(const Json& j, const char* key) {
  const Json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

}  // namespace

MetricsReport metrics_from_json(const Json& j) {
  MetricsReport r;
  r.method = j.at("method").get<std::string>();
  r.ua = j.at("ua").get<double>();
  r.ra = j.at("ra").get<double>();
  r.ta = j.at("ta").get<double>();
  r.mia = j.at("mia").get<double>();
  r.ua_test = read_optional(j, "ua_test");
  r.mia_threshold = read_number(j, "mia_threshold");
  r.mia_degenerate = j.at("mia_degenerate").get<bool>();
  return r;
}

PathProfile profile_from_json(const Json& j) {
  PathProfile p;
  for (const auto& e : j) {
    ProfilePoint pt;
    pt.t = e.at("t").get<double>();
    pt.acc.acc_f = e.at("acc_f").get<double>();
    pt.acc.acc_r = e.at("acc_r").get<double>();
    pt.acc.acc_t = e.at("acc_t").get<double>();
    pt.acc.acc_tf = read_optional(e, "acc_tf");
    pt.gap = e.at("gap").get<double>();
    p.points.push_back(pt);
  }
  return p;
}

Interval interval_from_json(const Json& j) {
  return {j.at("lo").get<double>(), j.at("hi").get<double>(),
          j.at("lo_closed").get<bool>(), j.at("hi_closed").get<bool>()};
}

}  // namespace detail

}  // namespace mcu
