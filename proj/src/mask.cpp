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

#include "mculab/mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {

ImportanceScores importance_from_grads(const Gradients& grads) {
  ImportanceScores s;
  for (const auto& t : grads.tensors()) {
    double sq = 0.0;
    for (double g : t.values) sq += g * g;
    const double score = std::sqrt(sq) / static_cast<double>(t.size());
    if (!std::isfinite(score)) {
      throw NumericError("non-finite importance for tensor " + t.name);
    }
    s.names.push_back(t.name);
    s.values.push_back(score);
  }
  return s;
}

ImportanceScores importance(const Mlp& net, const ParamSet& params,
                            const LabeledDataset& data, std::size_t batch_size) {
  if (data.empty()) throw InvalidInputError("importance on empty dataset");
  if (batch_size == 0) throw InvalidInputError("importance batch size must be positive");
  const std::size_t n = data.size();
  Gradients total = ParamSet::zeros_like(params);
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const LabeledDataset batch = data.subset(rows);
    const LossAndGrad lg = net.backward(params, batch.features, batch.labels);
    // Mean over the whole set = sum of batch means weighted by batch share.
    const double w = static_cast<double>(end - start) / static_cast<double>(n);
    total = axpy(total, w, lg.grads);
  }
  return importance_from_grads(total);
}

std::size_t selection_count(double fraction, std::size_t total) {
  const double raw = std::ceil(fraction * static_cast<double>(total) - 1e-9);
  if (raw <= 0.0) return 0;
  return std::min(total, static_cast<std::size_t>(raw));
}

std::vector<std::size_t> top_tensors(const std::vector<double>& scores,
                                     std::size_t count) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  idx.resize(std::min(count, idx.size()));
  return idx;
}

namespace {

Selection rank_select(const std::vector<double>& scores, double fraction) {
  Selection sel;
  sel.fraction = fraction;
  sel.count = selection_count(fraction, scores.size());
  const auto top = top_tensors(scores, sel.count);
  std::vector<bool> chosen(scores.size(), false);
  for (auto i : top) chosen[i] = true;
  sel.threshold = top.empty() ? std::numeric_limits<double>::infinity()
                              : scores[top.back()];
  sel.bits = TensorMask(std::move(chosen));
  return sel;
}

}  // namespace

Selection filter_mask(const ImportanceScores& scores_r, double k_r) {
  if (!(k_r >= 0.0 && k_r < 1.0)) {
    throw InvalidInputError("k_r must lie in [0, 1)");
  }
  Selection sel = rank_select(scores_r.values, k_r);
  std::vector<bool> keep = sel.bits.bits();
  keep.flip();
  sel.bits = TensorMask(std::move(keep));
  return sel;
}

Selection reserve_mask(const ImportanceScores& scores_f, double k) {
  if (!(k > 0.0 && k <= 1.0)) {
    throw InvalidInputError("k must lie in (0, 1]");
  }
  return rank_select(scores_f.values, k);
}

TensorMask combine(const TensorMask& m_r, const TensorMask& m_f) {
  if (m_r.size() != m_f.size()) {
    throw ConfigError("cannot combine masks over different tensor sets");
  }
  std::vector<bool> out(m_r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m_r.selected(i) && m_f.selected(i);
  return TensorMask(std::move(out));
}

std::vector<bool> select_by_threshold(const std::vector<double>& scores,
                                      double threshold, std::size_t count) {
  std::vector<bool> out(scores.size(), false);
  std::size_t taken = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > threshold) {
      out[i] = true;
      ++taken;
    }
  }
  for (std::size_t i = 0; i < scores.size() && taken < count; ++i) {
    if (scores[i] == threshold && !out[i]) {
      out[i] = true;
      ++taken;
    }
  }
  return out;
}

std::string ParameterMask::digest() const {
  std::string buf;
  for (bool b : bits.bits()) buf.push_back(b ? '1' : '0');
  char num[128];
  std::snprintf(num, sizeof(num), "|%.17g|%.17g|%.17g|%.17g", filter.fraction,
                reserve.fraction, filter.threshold, reserve.threshold);
  buf += num;
  std::snprintf(num, sizeof(num), "%016llx",
                static_cast<unsigned long long>(fnv1a(buf)));
  return num;
}

std::string ParameterMask::to_json() const {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::ordered_json j;
  j["k"] = reserve.fraction;
  j["k_r"] = filter.fraction;
  j["gamma_k"] = finite_or_null(reserve.threshold);
  j["gamma_k_r"] = finite_or_null(filter.threshold);
  j["selected"] = bits.count();
  j["digest"] = digest();
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    nlohmann::ordered_json t;
    t["tensor_name"] = i < scores_r.names.size() ? scores_r.names[i] : "";
    t["bit"] = bits.selected(i) ? 1 : 0;
    t["score_r"] = i < scores_r.size() ? scores_r.values[i] : 0.0;
    t["score_f"] = i < scores_f.size() ? scores_f.values[i] : 0.0;
    tensors.push_back(std::move(t));
  }
  j["tensors"] = std::move(tensors);
  return j.dump(2);
}

ParameterMask build_mask(const Mlp& net, const ParamSet& theta_o,
                         const LabeledDataset& d_r, const LabeledDataset& d_f,
                         double k, double k_r) {
  ParameterMask m;
  m.scores_r = importance(net, theta_o, d_r);
  m.scores_f = importance(net, theta_o, d_f);
  m.filter = filter_mask(m.scores_r, k_r);
  m.reserve = reserve_mask(m.scores_f, k);
  m.bits = combine(m.filter.bits, m.reserve.bits);
  return m;
}

ParameterMask full_mask(const ParamSet& like) {
  ParameterMask m;
  m.bits = TensorMask::all(like.size());
  m.filter.bits = TensorMask::all(like.size());
  m.filter.threshold = std::numeric_limits<double>::infinity();
  m.reserve.bits = TensorMask::all(like.size());
  m.reserve.fraction = 1.0;
  m.reserve.count = like.size();
  for (const auto& t : like.tensors()) {
    m.scores_r.names.push_back(t.name);
    m.scores_r.values.push_back(0.0);
  }
  m.scores_f = m.scores_r;
  return m;
}

}  // namespace mcu
