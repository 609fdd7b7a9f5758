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

#include "mculab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_convert.hpp"
#include "mculab/baselines.hpp"
#include "mculab/errors.hpp"
#include "mculab/params_io.hpp"
#include "mculab/report.hpp"

namespace mcu {

namespace fs = std::filesystem;
using detail::Json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Named purposes; each gets its own stream of the root seed.
constexpr const char* kSeedNames[] = {"data",     "data.test", "split", "split.val",
                                      "init",     "original",  "rt",    "unlearn",
                                      "curve"};

}  // namespace

DataSplits prepare_data(const ExperimentConfig& config) {
  config.validate();
  const std::uint64_t seed = config.seed;
  DataSplits s;
  s.d_train = make_dataset(config.dataset, sub_seed(seed, "data"));
  DatasetSpec test_spec = config.dataset;
  test_spec.size = config.test_size;
  const LabeledDataset pool = make_dataset(test_spec, sub_seed(seed, "data.test"));
  Partition val = split_validation(pool, config.val_fraction, sub_seed(seed, "split.val"));
  s.d_v = std::move(val.first);
  s.d_t = std::move(val.second);
  if (config.scenario == Scenario::kRandom) {
    Partition f = split_random_forgetting(s.d_train, config.forget_ratio,
                                          sub_seed(seed, "split"), config.stratified);
    s.d_f = std::move(f.first);
    s.d_r = std::move(f.second);
  } else {
    ClasswiseSplit c = split_classwise(s.d_train, s.d_t, config.forget_class);
    s.d_f = std::move(c.d_f);
    s.d_r = std::move(c.d_r);
    s.d_tf = std::move(c.d_tf);
    s.d_tr = std::move(c.d_tr);
  }
  return s;
}

OriginalModel train_original(const ExperimentConfig& config, const DataSplits& splits) {
  const Mlp net(config.architecture());
  TrainConfig tc = config.original;
  tc.seed = sub_seed(config.seed, "original");
  const auto start = Clock::now();
  OriginalModel out;
  out.theta_o = train_from_scratch(net, splits.d_train, tc, sub_seed(config.seed, "init"));
  out.seconds = seconds_since(start);
  out.refs.acc_train_o = net.accuracy(out.theta_o, splits.d_train);
  out.refs.acc_v_o = net.accuracy(out.theta_o, splits.d_v);
  return out;
}

TimedParams train_rt(const ExperimentConfig& config, const DataSplits& splits) {
  const Mlp net(config.architecture());
  TrainConfig tc = config.original;
  tc.seed = sub_seed(config.seed, "rt");
  const auto start = Clock::now();
  TimedParams out;
  out.params = retrain(net, splits.d_r, tc, sub_seed(config.seed, "init"));
  out.seconds = seconds_since(start);
  return out;
}

TimedParams pre_unlearn(const ExperimentConfig& config, const ParamSet& theta_o,
                        const DataSplits& splits) {
  const Mlp net(config.architecture());
  UnlearnConfig uc = config.unlearn;
  uc.seed = sub_seed(config.seed, "unlearn");
  const auto start = Clock::now();
  TimedParams out;
  switch (config.method) {
    case Method::kRetrain: {
      TrainConfig tc = config.original;
      tc.seed = uc.seed;
      out.params = retrain(net, splits.d_r, tc, sub_seed(config.seed, "init"));
      break;
    }
    case Method::kFinetune:
      out.params = finetune(net, theta_o, splits.d_r, uc);
      break;
    case Method::kRandomLabel:
      out.params = random_label(net, theta_o, splits.d_f, splits.d_r, uc);
      break;
    case Method::kGradientAscent:
      out.params = gradient_ascent(net, theta_o, splits.d_f, uc);
      break;
    case Method::kNegGradPlus:
      out.params = neggrad_plus(net, theta_o, splits.d_f, splits.d_r, uc);
      break;
    case Method::kNegTaskVector:
      out.params = negtv(net, theta_o, splits.d_f, uc).theta_u;
      break;
    case Method::kSalunLite:
      out.params = salun_lite(net, theta_o, splits.d_f, splits.d_r, uc);
      break;
  }
  out.seconds = seconds_since(start);
  if (!out.params.all_finite()) {
    throw NumericError(std::string(display_name(config.method)) +
                       " produced non-finite parameters");
  }
  return out;
}

McuOutcome train_mcu(const ExperimentConfig& config, const ParamSet& theta_o,
                     const ParamSet& theta_p, const DataSplits& splits,
                     const ReferenceAccuracies& refs) {
  const Mlp net(config.architecture());
  McuOutcome out;
  auto start = Clock::now();
  out.mask = build_mask(net, theta_o, splits.d_r, splits.d_f, config.mask_k, config.mask_k_r);
  out.mask_seconds = seconds_since(start);

  CurveTrainConfig cc = config.curve;
  cc.seed = sub_seed(config.seed, "curve");
  start = Clock::now();
  out.training = train_curve(net, theta_o, theta_p, splits.d_r, splits.d_f, out.mask, cc, refs);
  out.curve_seconds = seconds_since(start);
  out.curve = BezierCurve{theta_o, out.training.theta_c, theta_p};
  return out;
}

CurveSummary summarize(const McuOutcome& mcu) {
  CurveSummary s;
  s.mask_digest = mcu.mask.digest();
  s.mask_selected = mcu.mask.bits.count();
  s.tensor_count = mcu.mask.bits.size();
  s.steps = mcu.training.steps;
  s.beta_zero = mcu.training.beta_zero;
  s.beta_mild = mcu.training.beta_mild;
  s.beta_strong = mcu.training.beta_strong;
  s.beta_fixed = mcu.training.beta_fixed;
  s.final_beta = mcu.training.final_beta;
  s.last_loss = mcu.training.last_loss;
  return s;
}

const MetricsReport* ResultsBundle::find(std::string_view method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

ResultsBundle assemble_bundle(const ExperimentConfig& config, const DataSplits& splits,
                              const ModelSet& models, Timings timings) {
  const Mlp net(config.architecture());
  ResultsBundle b;
  b.config_text = config.to_text(false);
  b.config_hash = config.hash();
  b.seed = config.seed;
  b.scenario = std::string(to_string(config.scenario));
  b.architecture = config.architecture().describe();
  for (const char* name : kSeedNames) b.seeds[name] = sub_seed(config.seed, name);
  b.refs = models.refs;

  auto time_of = [&](const char* key) {
    const auto it = timings.find(key);
    return it == timings.end() ? 0.0 : it->second;
  };

  MetricsReport original = metrics(net, models.theta_o, splits, "Original");
  original.rte_seconds = time_of("original");
  b.methods.push_back(original);
  b.digests["original"] = params_digest(models.theta_o);

  if (models.theta_rt) {
    MetricsReport rt = metrics(net, *models.theta_rt, splits, "RT");
    rt.rte_seconds = time_of("rt");
    b.methods.push_back(rt);
    b.digests["rt"] = params_digest(*models.theta_rt);
  }
  if (models.theta_p) {
    b.pre_method = std::string(display_name(config.method));
    MetricsReport pre = metrics(net, *models.theta_p, splits, b.pre_method);
    pre.rte_seconds = time_of("unlearn");
    b.methods.push_back(pre);
    b.digests["pre"] = params_digest(*models.theta_p);
  }
  if (models.curve) {
    const auto start = Clock::now();
    const OptimalModel opt = find_optimal_t(net, *models.curve, splits, models.refs);
    const EffectiveRegion region = effective_region(net, *models.curve, splits, models.refs);
    timings["select"] = seconds_since(start);

    OptimalSummary os;
    os.t_star = opt.choice.t;
    os.fitted_gap = opt.choice.fitted_gap;
    os.measured_gap = opt.measured_gap;
    os.sample_gaps = opt.sample_gaps;
    os.endpoint_gap = region.endpoint_gap;
    b.optimal = os;
    b.region = region.intervals;
    b.profile = region.profile;
    b.curve = models.curve_summary;

    MetricsReport mcu = metrics(net, opt.params, splits, "MCU");
    mcu.rte_seconds =
        time_of("unlearn") + time_of("mask") + time_of("curve") + timings["select"];
    b.methods.push_back(mcu);
    b.digests["control"] = params_digest(models.curve->theta_c);
    b.digests["mcu"] = params_digest(opt.params);
  }
  b.timings = std::move(timings);
  return b;
}

// ---------------------------------------------------------------------------
// JSON

std::string ResultsBundle::to_json() const {
  Json j;
  j["format"] = "mculab-bundle/1";
  j["version"] = version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["scenario"] = scenario;
  j["architecture"] = architecture;
  j["pre_method"] = pre_method;
  j["config"] = config_text;
  j["seeds"] = Json::object();
  for (const auto& [k, v] : seeds) j["seeds"][k] = v;
  j["refs"] = {{"acc_train_o", refs.acc_train_o}, {"acc_v_o", refs.acc_v_o}};
  const MetricsReport* rt_report = rt();
  j["methods"] = Json::array();
  for (const auto& m : methods) j["methods"].push_back(detail::to_json(m, rt_report));
  if (optimal) {
    j["optimal"] = {{"t_star", optimal->t_star},
                    {"fitted_gap", optimal->fitted_gap},
                    {"measured_gap", optimal->measured_gap},
                    {"sample_t", kOptimalSampleT},
                    {"sample_gaps", optimal->sample_gaps},
                    {"endpoint_gap", optimal->endpoint_gap}};
  } else {
    j["optimal"] = nullptr;
  }
  j["region"] = Json::array();
  for (const auto& i : region) j["region"].push_back(detail::to_json(i));
  j["profile"] = detail::to_json(profile);
  if (curve) {
    j["curve"] = {{"mask_digest", curve->mask_digest},
                  {"mask_selected", curve->mask_selected},
                  {"tensor_count", curve->tensor_count},
                  {"steps", curve->steps},
                  {"beta_zero", curve->beta_zero},
                  {"beta_mild", curve->beta_mild},
                  {"beta_strong", curve->beta_strong},
                  {"beta_fixed", curve->beta_fixed},
                  {"final_beta", curve->final_beta},
                  {"last_loss", detail::number_or_null(curve->last_loss)}};
  } else {
    j["curve"] = nullptr;
  }
  j["digests"] = Json::object();
  for (const auto& [k, v] : digests) j["digests"][k] = v;
  return j.dump(2) + "\n";
}

ResultsBundle ResultsBundle::from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    ResultsBundle b;
    b.version = j.at("version").get<std::string>();
    b.config_hash = j.at("config_hash").get<std::string>();
    b.seed = j.at("seed").get<std::uint64_t>();
    b.scenario = j.at("scenario").get<std::string>();
    b.architecture = j.at("architecture").get<std::string>();
    b.pre_method = j.at("pre_method").get<std::string>();
    b.config_text = j.at("config").get<std::string>();
    for (const auto& [k, v] : j.at("seeds").items()) b.seeds[k] = v.get<std::uint64_t>();
    b.refs.acc_train_o = j.at("refs").at("acc_train_o").get<double>();
    b.refs.acc_v_o = j.at("refs").at("acc_v_o").get<double>();
    for (const auto& m : j.at("methods")) b.methods.push_back(detail::metrics_from_json(m));
    if (!j.at("optimal").is_null()) {
      const Json& o = j.at("optimal");
      OptimalSummary os;
      os.t_star = o.at("t_star").get<double>();
      os.fitted_gap = o.at("fitted_gap").get<double>();
      os.measured_gap = o.at("measured_gap").get<double>();
      os.sample_gaps = o.at("sample_gaps").get<std::array<double, 3>>();
      os.endpoint_gap = o.at("endpoint_gap").get<double>();
      b.optimal = os;
    }
    for (const auto& i : j.at("region")) b.region.push_back(detail::interval_from_json(i));
    b.profile = detail::profile_from_json(j.at("profile"));
    if (!j.at("curve").is_null()) {
      const Json& c = j.at("curve");
      CurveSummary cs;
      cs.mask_digest = c.at("mask_digest").get<std::string>();
      cs.mask_selected = c.at("mask_selected").get<std::size_t>();
      cs.tensor_count = c.at("tensor_count").get<std::size_t>();
      cs.steps = c.at("steps").get<std::size_t>();
      cs.beta_zero = c.at("beta_zero").get<std::size_t>();
      cs.beta_mild = c.at("beta_mild").get<std::size_t>();
      cs.beta_strong = c.at("beta_strong").get<std::size_t>();
      cs.beta_fixed = c.at("beta_fixed").get<std::size_t>();
      cs.final_beta = c.at("final_beta").get<double>();
      cs.last_loss = c.at("last_loss").is_null() ? 0.0 : c.at("last_loss").get<double>();
      b.curve = cs;
    }
    for (const auto& [k, v] : j.at("digests").items()) b.digests[k] = v.get<std::string>();
    return b;
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed bundle: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Artifacts on disk

namespace {

struct Layout {
  fs::path root;
  fs::path data(const char* name) const { return root / "data" / (std::string(name) + ".csv"); }
  fs::path model(const char* name) const {
    return root / "models" / (std::string(name) + ".params");
  }
  fs::path model_meta(const char* name) const {
    return root / "models" / (std::string(name) + ".json");
  }
  fs::path refs() const { return root / "refs.json"; }
  fs::path mask() const { return root / "mask.json"; }
  fs::path curve(const char* name) const {
    return root / "curve" / (std::string(name) + ".params");
  }
  fs::path curve_meta() const { return root / "curve" / "meta.json"; }
  fs::path bundle() const { return root / "bundle.json"; }
  fs::path timings() const { return root / "timings.json"; }
};

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(std::string("missing ") + what + " (" + path.string() +
                      "); run the upstream stage first");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& path, const char* what) {
  const std::string text = read_text(path, what);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_checkpoint(const fs::path& path, const ParamSet& params) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  save_params(path, params);
}

ParamSet require_params(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw ConfigError(std::string("missing ") + what + " checkpoint (" + path.string() +
                      "); run the upstream stage first");
  }
  return load_params(path);
}

void write_model(const Layout& l, const char* name, const std::string& method,
                 const ExperimentConfig& config, const ParamSet& params) {
  save_checkpoint(l.model(name), params);
  Json meta;
  meta["method"] = method;
  meta["config_hash"] = config.hash();
  meta["seed"] = config.seed;
  meta["architecture"] = config.architecture().describe();
  meta["digest"] = params_digest(params);
  write_text(l.model_meta(name), meta.dump(2) + "\n");
}

Timings read_timings(const Layout& l) {
  Timings t;
  if (!fs::exists(l.timings())) return t;
  const Json j = read_json(l.timings(), "timings");
  for (const auto& [k, v] : j.items()) {
    if (v.is_number()) t[k] = v.get<double>();
  }
  return t;
}

void write_timings(const Layout& l, const Timings& t) {
  Json j = Json::object();
  for (const auto& [k, v] : t) j[k] = v;
  write_text(l.timings(), j.dump(2) + "\n");
}

void merge_timings(const Layout& l, const Timings& update) {
  Timings t = read_timings(l);
  for (const auto& [k, v] : update) t[k] = v;
  write_timings(l, t);
}

void save_splits(const Layout& l, const DataSplits& s) {
  fs::create_directories(l.root / "data");
  save_csv(l.data("train"), s.d_train);
  save_csv(l.data("forget"), s.d_f);
  save_csv(l.data("retain"), s.d_r);
  save_csv(l.data("val"), s.d_v);
  save_csv(l.data("test"), s.d_t);
  if (s.classwise()) {
    save_csv(l.data("test_forget"), *s.d_tf);
    save_csv(l.data("test_retain"), *s.d_tr);
  }
}

DataSplits load_splits(const Layout& l, const ExperimentConfig& config) {
  auto load = [&](const char* name) {
    const fs::path p = l.data(name);
    if (!fs::exists(p)) {
      throw ConfigError("missing data split " + p.string() +
                        "; run train-original first");
    }
    return load_csv(p, config.dataset.class_count);
  };
  DataSplits s;
  s.d_train = load("train");
  s.d_f = load("forget");
  s.d_r = load("retain");
  s.d_v = load("val");
  s.d_t = load("test");
  if (config.scenario == Scenario::kClasswise) {
    s.d_tf = load("test_forget");
    s.d_tr = load("test_retain");
  }
  return s;
}

ReferenceAccuracies load_refs(const Layout& l) {
  const Json j = read_json(l.refs(), "reference accuracies");
  ReferenceAccuracies r;
  r.acc_train_o = j.at("acc_train_o").get<double>();
  r.acc_v_o = j.at("acc_v_o").get<double>();
  return r;
}

ModelSet load_models(const Layout& l) {
  ModelSet m;
  m.theta_o = require_params(l.model("original"), "original model");
  m.refs = load_refs(l);
  if (fs::exists(l.model("rt"))) m.theta_rt = load_params(l.model("rt"));
  if (fs::exists(l.model("pre"))) m.theta_p = load_params(l.model("pre"));
  if (fs::exists(l.curve("theta_c"))) {
    m.curve = BezierCurve{require_params(l.curve("theta_o"), "curve endpoint theta_o"),
                          load_params(l.curve("theta_c")),
                          require_params(l.curve("theta_p"), "curve endpoint theta_p")};
    const Json meta = read_json(l.curve_meta(), "curve metadata");
    CurveSummary cs;
    cs.mask_digest = meta.at("mask_digest").get<std::string>();
    cs.mask_selected = meta.at("mask_selected").get<std::size_t>();
    cs.tensor_count = meta.at("tensor_count").get<std::size_t>();
    cs.steps = meta.at("steps").get<std::size_t>();
    cs.beta_zero = meta.at("beta_zero").get<std::size_t>();
    cs.beta_mild = meta.at("beta_mild").get<std::size_t>();
    cs.beta_strong = meta.at("beta_strong").get<std::size_t>();
    cs.beta_fixed = meta.at("beta_fixed").get<std::size_t>();
    cs.final_beta = meta.at("final_beta").get<double>();
    cs.last_loss = meta.at("last_loss").is_null() ? 0.0 : meta.at("last_loss").get<double>();
    m.curve_summary = cs;
  }
  return m;
}

void write_curve(const Layout& l, const ExperimentConfig& config, const McuOutcome& mcu) {
  write_text(l.mask(), mcu.mask.to_json() + "\n");
  save_checkpoint(l.curve("theta_o"), mcu.curve.theta_o);
  save_checkpoint(l.curve("theta_c"), mcu.curve.theta_c);
  save_checkpoint(l.curve("theta_p"), mcu.curve.theta_p);
  const CurveSummary cs = summarize(mcu);
  Json meta;
  meta["config_hash"] = config.hash();
  meta["seed"] = config.seed;
  meta["curve_seed"] = sub_seed(config.seed, "curve");
  meta["mask_digest"] = cs.mask_digest;
  meta["mask_selected"] = cs.mask_selected;
  meta["tensor_count"] = cs.tensor_count;
  meta["beta_mode"] = std::string(to_string(config.curve.beta_mode));
  meta["steps"] = cs.steps;
  meta["beta_zero"] = cs.beta_zero;
  meta["beta_mild"] = cs.beta_mild;
  meta["beta_strong"] = cs.beta_strong;
  meta["beta_fixed"] = cs.beta_fixed;
  meta["final_beta"] = cs.final_beta;
  meta["last_loss"] = detail::number_or_null(cs.last_loss);
  write_text(l.curve_meta(), meta.dump(2) + "\n");
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kTrainOriginal: return "train-original";
    case Stage::kUnlearn: return "unlearn";
    case Stage::kMcu: return "mcu";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kReport: return "report";
    case Stage::kSweep: return "sweep";
    case Stage::kRun: return "run";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : {Stage::kTrainOriginal, Stage::kUnlearn, Stage::kMcu, Stage::kEvaluate,
                   Stage::kReport, Stage::kSweep, Stage::kRun}) {
    if (s == to_string(st)) return st;
  }
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

void stage_train_original(const ExperimentConfig& config) {
  const Layout l{config.out};
  const DataSplits splits = prepare_data(config);
  save_splits(l, splits);
  const OriginalModel o = train_original(config, splits);
  write_model(l, "original", "original", config, o.theta_o);
  Json refs;
  refs["acc_train_o"] = o.refs.acc_train_o;
  refs["acc_v_o"] = o.refs.acc_v_o;
  write_text(l.refs(), refs.dump(2) + "\n");
  merge_timings(l, {{"original", o.seconds}});
}

void stage_unlearn(const ExperimentConfig& config) {
  config.validate();
  const Layout l{config.out};
  const DataSplits splits = load_splits(l, config);
  const ParamSet theta_o = require_params(l.model("original"), "original model");
  Mlp(config.architecture()).check_params(theta_o);
  const TimedParams rt = train_rt(config, splits);
  write_model(l, "rt", "rt", config, rt.params);
  const TimedParams pre = pre_unlearn(config, theta_o, splits);
  write_model(l, "pre", std::string(to_string(config.method)), config, pre.params);
  merge_timings(l, {{"rt", rt.seconds}, {"unlearn", pre.seconds}});
}

void stage_mcu(const ExperimentConfig& config) {
  config.validate();
  const Layout l{config.out};
  const ParamSet theta_p = require_params(l.model("pre"), "pre-unlearning model (theta_p)");
  const ParamSet theta_o = require_params(l.model("original"), "original model");
  const DataSplits splits = load_splits(l, config);
  const ReferenceAccuracies refs = load_refs(l);
  const McuOutcome mcu = train_mcu(config, theta_o, theta_p, splits, refs);
  write_curve(l, config, mcu);
  merge_timings(l, {{"mask", mcu.mask_seconds}, {"curve", mcu.curve_seconds}});
}

ResultsBundle stage_evaluate(const ExperimentConfig& config) {
  config.validate();
  const Layout l{config.out};
  const ModelSet models = load_models(l);
  const DataSplits splits = load_splits(l, config);
  ResultsBundle b = assemble_bundle(config, splits, models, read_timings(l));
  write_text(l.bundle(), b.to_json());
  write_timings(l, b.timings);
  return b;
}

namespace {

// RTE is not part of the bundle; rebuild it from the timing log.
void attach_rte(ResultsBundle& b) {
  auto time_of = [&](const char* k) {
    const auto it = b.timings.find(k);
    return it == b.timings.end() ? 0.0 : it->second;
  };
  for (auto& m : b.methods) {
    if (m.method == "Original") {
      m.rte_seconds = time_of("original");
    } else if (m.method == "RT") {
      m.rte_seconds = time_of("rt");
    } else if (m.method == "MCU") {
      m.rte_seconds =
          time_of("unlearn") + time_of("mask") + time_of("curve") + time_of("select");
    } else {
      m.rte_seconds = time_of("unlearn");
    }
  }
}

ResultsBundle load_bundle(const Layout& l) {
  ResultsBundle b = ResultsBundle::from_json(read_text(l.bundle(), "results bundle"));
  b.timings = read_timings(l);
  attach_rte(b);
  return b;
}

}  // namespace

void stage_report(const ExperimentConfig& config) {
  const Layout l{config.out};
  emit_report(load_bundle(l), l.root);
}

void run_stage(Stage stage, const ExperimentConfig& config) {
  const std::string name(to_string(stage));
  try {
    switch (stage) {
      case Stage::kTrainOriginal: stage_train_original(config); break;
      case Stage::kUnlearn: stage_unlearn(config); break;
      case Stage::kMcu: stage_mcu(config); break;
      case Stage::kEvaluate: stage_evaluate(config); break;
      case Stage::kReport: stage_report(config); break;
      case Stage::kSweep: run_sweep(config, sweep_threads_from_env()); break;
      case Stage::kRun: run_experiment(config); break;
    }
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, StageError::Kind::kConfig, e.what());
  } catch (const InvalidInputError& e) {
    throw StageError(name, StageError::Kind::kConfig, e.what());
  } catch (const NumericError& e) {
    throw StageError(name, StageError::Kind::kNumeric, e.what());
  } catch (const std::exception& e) {
    throw StageError(name, StageError::Kind::kOther, e.what());
  }
}

ResultsBundle run_experiment(const ExperimentConfig& config) {
  config.validate();
  for (Stage s : {Stage::kTrainOriginal, Stage::kUnlearn, Stage::kMcu, Stage::kEvaluate,
                  Stage::kReport}) {
    run_stage(s, config);
  }
  return load_bundle(Layout{config.out});
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  if (config.sweep_beta.empty() && config.sweep_k.empty() && config.sweep_k_r.empty()) {
    throw ConfigError("sweep needs at least one of sweep.beta, sweep.k, sweep.k_r");
  }
  auto axis = [](const std::vector<double>& v) {
    return v.empty() ? std::vector<std::optional<double>>{std::nullopt}
                     : std::vector<std::optional<double>>(v.begin(), v.end());
  };
  std::vector<SweepPoint> out;
  for (const auto& beta : axis(config.sweep_beta)) {
    for (const auto& k : axis(config.sweep_k)) {
      for (const auto& k_r : axis(config.sweep_k_r)) {
        SweepPoint p;
        p.config = config;
        std::string label;
        auto add = [&](const char* name, double v) {
          if (!label.empty()) label += '_';
          label += std::string(name) + "=" + format_number(v);
        };
        if (beta) {
          p.config.curve.beta_mode = BetaMode::kFixed;
          p.config.curve.beta = *beta;
          add("beta", *beta);
        }
        if (k) {
          p.config.mask_k = *k;
          add("k", *k);
        }
        if (k_r) {
          p.config.mask_k_r = *k_r;
          add("k_r", *k_r);
        }
        p.config.sweep_beta.clear();
        p.config.sweep_k.clear();
        p.config.sweep_k_r.clear();
        p.config.out = (fs::path(config.out) / "sweep" / label).string();
        p.label = std::move(label);
        p.config.validate();
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  SweepResult result;
  result.points = sweep_points(config);
  const Layout base{config.out};
  if (!fs::exists(base.model("pre"))) {
    run_stage(Stage::kTrainOriginal, config);
    run_stage(Stage::kUnlearn, config);
  }
  const DataSplits splits = load_splits(base, config);
  const ModelSet shared = load_models(base);
  const Timings base_timings = read_timings(base);
  if (!shared.theta_p) throw ConfigError("sweep needs the pre-unlearning model");

  result.bundles.resize(result.points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.points.size()) return;
      try {
        const ExperimentConfig& pc = result.points[i].config;
        McuOutcome mcu = train_mcu(pc, shared.theta_o, *shared.theta_p, splits, shared.refs);
        ModelSet models = shared;
        models.curve = mcu.curve;
        models.curve_summary = summarize(mcu);
        Timings t = base_timings;
        t["mask"] = mcu.mask_seconds;
        t["curve"] = mcu.curve_seconds;
        result.bundles[i] = assemble_bundle(pc, splits, models, t);
        emit_report(result.bundles[i], pc.out);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = result.points.size();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, result.points.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream csv;
  csv << "label,beta_mode,beta,k,k_r,t_star,measured_gap,endpoint_gap,region_measure,"
         "mcu_avg_gap\n";
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const ExperimentConfig& pc = result.points[i].config;
    const ResultsBundle& b = result.bundles[i];
    double measure = 0.0;
    for (const auto& iv : b.region) measure += iv.hi - iv.lo;
    const MetricsReport* mcu = b.find("MCU");
    csv << result.points[i].label << ',' << to_string(pc.curve.beta_mode) << ','
        << format_number(pc.curve.beta) << ',' << format_number(pc.mask_k) << ','
        << format_number(pc.mask_k_r) << ',' << format_number(b.optimal->t_star) << ','
        << format_number(b.optimal->measured_gap) << ','
        << format_number(b.optimal->endpoint_gap) << ',' << format_number(measure) << ',';
    if (mcu != nullptr && b.rt() != nullptr) csv << format_number(gaps(*mcu, b.rt()).avg_gap);
    csv << '\n';
  }
  write_text(fs::path(config.out) / "sweep.csv", csv.str());
  return result;
}

std::size_t sweep_threads_from_env() {
  if (const char* v = std::getenv("MCULAB_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (end == v || *end != '\0' || n == 0) {
      throw ConfigError("MCULAB_THREADS must be a positive integer");
    }
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mcu
