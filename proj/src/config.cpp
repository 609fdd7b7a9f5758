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

#include "mculab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mculab/errors.hpp"
#include "mculab/eval.hpp"
#include "mculab/rng.hpp"

namespace mcu {

std::string_view to_string(Scenario s) {
  return s == Scenario::kRandom ? "random" : "classwise";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "random") return Scenario::kRandom;
  if (s == "classwise") return Scenario::kClasswise;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

std::uint64_t sub_seed(std::uint64_t root, std::string_view name) {
  return Rng::stream(root, name).next_u64();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string bad(std::string_view key, std::string_view value, const char* want) {
  return "key '" + std::string(key) + "': expected " + want + ", got '" +
         std::string(value) + "'";
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(bad(key, v, "a finite number"));
  }
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(bad(key, v, "a non-negative integer"));
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(bad(key, v, "true or false"));
}

template <typename T, typename F>
std::vector<T> to_list(std::string_view v, F parse) {
  std::vector<T> out;
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(parse(trim(v.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

struct Key {
  std::string name;
  Getter get;
  Setter set;
};

std::string num(double v) { return format_number(v); }
std::string uint(std::uint64_t v) { return std::to_string(v); }

#define MCU_DOUBLE(NAME, FIELD)                                                      \
  Key {                                                                              \
    NAME, [](const ExperimentConfig& c) { return num(c.FIELD); },                    \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {            \
          c.FIELD = to_double(k, v);                                                 \
        }                                                                            \
  }
#define MCU_SIZE(NAME, FIELD)                                                        \
  Key {                                                                              \
    NAME, [](const ExperimentConfig& c) { return uint(c.FIELD); },                   \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {            \
          c.FIELD = static_cast<std::size_t>(to_u64(k, v));                          \
        }                                                                            \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"dataset.kind", [](const ExperimentConfig& c) { return std::string(to_string(c.dataset.kind)); },
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.dataset.kind = parse_generator(v);
       }},
      MCU_SIZE("dataset.train_size", dataset.size),
      MCU_SIZE("dataset.test_size", test_size),
      MCU_DOUBLE("dataset.noise", dataset.noise),
      {"dataset.classes", [](const ExperimentConfig& c) { return std::to_string(c.dataset.class_count); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.dataset.class_count = static_cast<int>(to_u64(k, v));
       }},
      MCU_SIZE("dataset.dim", dataset.dim),
      MCU_DOUBLE("dataset.radius", dataset.radius),
      MCU_DOUBLE("dataset.val_fraction", val_fraction),
      {"scenario", [](const ExperimentConfig& c) { return std::string(to_string(c.scenario)); },
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.scenario = parse_scenario(v);
       }},
      MCU_DOUBLE("forget.ratio", forget_ratio),
      {"forget.class", [](const ExperimentConfig& c) { return std::to_string(c.forget_class); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.forget_class = static_cast<int>(to_u64(k, v));
       }},
      {"forget.stratified", [](const ExperimentConfig& c) { return std::string(c.stratified ? "true" : "false"); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.stratified = to_bool(k, v);
       }},
      {"model.hidden", [](const ExperimentConfig& c) { return join(c.hidden, uint); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.hidden = to_list<std::size_t>(v, [&](std::string_view s) {
           return static_cast<std::size_t>(to_u64(k, s));
         });
       }},
      {"model.activation", [](const ExperimentConfig& c) { return std::string(to_string(c.activation)); },
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.activation = parse_activation(v);
       }},
      MCU_SIZE("original.epochs", original.epochs),
      MCU_DOUBLE("original.lr", original.lr),
      MCU_SIZE("original.batch_size", original.batch_size),
      {"unlearn.method", [](const ExperimentConfig& c) { return std::string(to_string(c.method)); },
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.method = parse_method(v);
       }},
      MCU_SIZE("unlearn.epochs", unlearn.epochs),
      MCU_DOUBLE("unlearn.lr", unlearn.lr),
      MCU_SIZE("unlearn.batch_size", unlearn.batch_size),
      MCU_DOUBLE("unlearn.alpha", unlearn.alpha),
      MCU_SIZE("unlearn.tv_epochs", unlearn.tv_epochs),
      MCU_DOUBLE("unlearn.neggrad_beta", unlearn.neggrad_beta),
      MCU_DOUBLE("unlearn.saliency_fraction", unlearn.saliency_fraction),
      MCU_DOUBLE("mask.k", mask_k),
      MCU_DOUBLE("mask.k_r", mask_k_r),
      MCU_SIZE("curve.epochs", curve.epochs),
      MCU_DOUBLE("curve.lr", curve.lr),
      MCU_SIZE("curve.batch_size", curve.batch_size),
      {"curve.beta_mode", [](const ExperimentConfig& c) { return std::string(to_string(c.curve.beta_mode)); },
       [](ExperimentConfig& c, std::string_view, std::string_view v) {
         c.curve.beta_mode = parse_beta_mode(v);
       }},
      MCU_DOUBLE("curve.beta", curve.beta),
      MCU_DOUBLE("curve.retain_proportion", curve.retain_proportion),
      MCU_DOUBLE("curve.ema_decay", curve.ema_decay),
      {"sweep.beta", [](const ExperimentConfig& c) { return join(c.sweep_beta, num); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.sweep_beta = to_list<double>(v, [&](std::string_view s) { return to_double(k, s); });
       }},
      {"sweep.k", [](const ExperimentConfig& c) { return join(c.sweep_k, num); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.sweep_k = to_list<double>(v, [&](std::string_view s) { return to_double(k, s); });
       }},
      {"sweep.k_r", [](const ExperimentConfig& c) { return join(c.sweep_k_r, num); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) {
         c.sweep_k_r = to_list<double>(v, [&](std::string_view s) { return to_double(k, s); });
       }},
      {"seed", [](const ExperimentConfig& c) { return uint(c.seed); },
       [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.seed = to_u64(k, v); }},
      {"out", [](const ExperimentConfig& c) { return c.out; },
       [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out = std::string(v); }},
  };
  return table;
}

#undef MCU_DOUBLE
#undef MCU_SIZE

const Key* find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

// Blobs with unit noise overlap enough that the original model memorises
// little of D_f; the large test pool keeps TA and MIA estimates steady.
ExperimentConfig::ExperimentConfig() {
  dataset.noise = 1.0;
  dataset.class_count = 4;
  test_size = 4000;
  original.epochs = 100;
  original.batch_size = 32;
  original.lr = 0.1;
  unlearn.epochs = 10;
  unlearn.lr = 0.05;
  unlearn.neggrad_beta = 0.5;
  curve.epochs = 10;
  curve.lr = 0.01;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const Key* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
  k->set(config, key, trim(value));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Architecture ExperimentConfig::architecture() const {
  Architecture a;
  a.widths.push_back(dataset.dim);
  a.widths.insert(a.widths.end(), hidden.begin(), hidden.end());
  a.widths.push_back(static_cast<std::size_t>(dataset.class_count));
  a.activation = activation;
  return a;
}

void ExperimentConfig::validate() const {
  dataset.validate();
  if (test_size < 20) throw ConfigError("dataset.test_size must be at least 20");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("dataset.val_fraction must lie in (0, 1)");
  }
  if (scenario == Scenario::kRandom && !(forget_ratio > 0.0 && forget_ratio < 1.0)) {
    throw ConfigError("forget.ratio must lie in (0, 1)");
  }
  if (scenario == Scenario::kClasswise &&
      (forget_class < 0 || forget_class >= dataset.class_count)) {
    throw ConfigError("forget.class out of range");
  }
  architecture().validate();
  original.validate();
  if (original.epochs == 0) throw ConfigError("original.epochs must be positive");
  unlearn.validate();
  if (!(mask_k > 0.0 && mask_k <= 1.0)) throw ConfigError("mask.k must lie in (0, 1]");
  if (!(mask_k_r >= 0.0 && mask_k_r < 1.0)) throw ConfigError("mask.k_r must lie in [0, 1)");
  curve.validate();
  for (double b : sweep_beta) {
    if (!(b >= 0.0)) throw ConfigError("sweep.beta values must be >= 0");
  }
  for (double k : sweep_k) {
    if (!(k > 0.0 && k <= 1.0)) throw ConfigError("sweep.k values must lie in (0, 1]");
  }
  for (double k : sweep_k_r) {
    if (!(k >= 0.0 && k < 1.0)) throw ConfigError("sweep.k_r values must lie in [0, 1)");
  }
  if (out.empty()) throw ConfigError("out must not be empty");
}

std::string ExperimentConfig::to_text(bool include_out) const {
  std::string s;
  for (const auto& k : keys()) {
    if (!include_out && k.name == "out") continue;
    s += k.name + " = " + k.get(*this) + "\n";
  }
  return s;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(to_text(false))));
  return buf;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return to_text() == other.to_text();
}

}  // namespace mcu
