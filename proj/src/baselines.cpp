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

#include "mculab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mculab/batching.hpp"
#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be >= 0");
}

ParamSet train_sgd(const Mlp& net, ParamSet params, const LabeledDataset& data,
                   const TrainConfig& config, const ElementMask* mask) {
  config.validate();
  net.check_params(params);
  if (config.epochs == 0 || config.lr == 0.0) return params;
  if (data.empty()) throw InvalidInputError("training on an empty dataset");
  Rng order = Rng::stream(config.seed, "order");
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& rows : epoch_batches(data.size(), config.batch_size, order)) {
      const LabeledDataset batch = data.subset(rows);
      LossAndGrad lg = net.backward(params, batch.features, batch.labels);
      check_loss(lg.loss, "train");
      params = mask ? sgd_step(std::move(params), lg.grads, config.lr, *mask)
                    : sgd_step(std::move(params), lg.grads, config.lr);
    }
  }
  return params;
}

ParamSet train_from_scratch(const Mlp& net, const LabeledDataset& data,
                            const TrainConfig& config, std::uint64_t init_seed) {
  Rng init = Rng::stream(init_seed, "init");
  return train_sgd(net, net.init(init), data, config);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kRetrain: return "rt";
    case Method::kFinetune: return "ft";
    case Method::kRandomLabel: return "rl";
    case Method::kGradientAscent: return "ga";
    case Method::kNegGradPlus: return "neggrad_plus";
    case Method::kNegTaskVector: return "negtv";
    case Method::kSalunLite: return "salun_lite";
  }
  return "?";
}

std::string_view display_name(Method m) {
  switch (m) {
    case Method::kRetrain: return "RT";
    case Method::kFinetune: return "FT";
    case Method::kRandomLabel: return "RL";
    case Method::kGradientAscent: return "GA";
    case Method::kNegGradPlus: return "NegGrad+";
    case Method::kNegTaskVector: return "NegTV";
    case Method::kSalunLite: return "SalUn-lite";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::kRetrain, Method::kFinetune, Method::kRandomLabel,
                   Method::kGradientAscent, Method::kNegGradPlus,
                   Method::kNegTaskVector, Method::kSalunLite}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown unlearning method '" + std::string(s) + "'");
}

void UnlearnConfig::validate() const {
  train_config().validate();
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(neggrad_beta >= 0.0)) throw ConfigError("neggrad_beta must be >= 0");
  if (!(saliency_fraction > 0.0 && saliency_fraction <= 1.0)) {
    throw ConfigError("saliency_fraction must lie in (0, 1]");
  }
}

ParamSet retrain(const Mlp& net, const LabeledDataset& d_r, const TrainConfig& config,
                 std::uint64_t init_seed) {
  return train_from_scratch(net, d_r, config, init_seed);
}

ParamSet finetune(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_r,
                  const UnlearnConfig& config) {
  config.validate();
  return train_sgd(net, theta_o, d_r, config.train_config());
}

LabeledDataset relabel_forget(const LabeledDataset& d_f, std::uint64_t seed) {
  if (d_f.class_count < 2) {
    throw InvalidInputError("random labelling needs at least two classes");
  }
  Rng rng = Rng::stream(seed, "relabel");
  LabeledDataset out = d_f;
  const auto wrong = static_cast<std::size_t>(d_f.class_count - 1);
  for (auto& y : out.labels) {
    const int r = static_cast<int>(rng.below(wrong));
    y = r < y ? r : r + 1;
  }
  return out;
}

ParamSet random_label(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                      const LabeledDataset& d_r, const UnlearnConfig& config) {
  config.validate();
  return train_sgd(net, theta_o, concat(d_r, relabel_forget(d_f, config.seed)),
                   config.train_config());
}

ParamSet gradient_ascent(const Mlp& net, const ParamSet& theta_o,
                         const LabeledDataset& d_f, const UnlearnConfig& config) {
  config.validate();
  net.check_params(theta_o);
  if (config.epochs == 0 || config.lr == 0.0) return theta_o;
  if (d_f.empty()) throw InvalidInputError("gradient ascent on empty forget set");
  ParamSet params = theta_o;
  Rng order = Rng::stream(config.seed, "order");
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& rows : epoch_batches(d_f.size(), config.batch_size, order)) {
      const LabeledDataset batch = d_f.subset(rows);
      LossAndGrad lg = net.backward(params, batch.features, batch.labels);
      check_loss(lg.loss, "gradient_ascent");
      params = sgd_step(std::move(params), lg.grads, -config.lr);
    }
  }
  return params;
}

ParamSet neggrad_plus(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                      const LabeledDataset& d_r, const UnlearnConfig& config) {
  config.validate();
  net.check_params(theta_o);
  if (config.epochs == 0 || config.lr == 0.0) return theta_o;
  if (d_f.empty() || d_r.empty()) {
    throw InvalidInputError("NegGrad+ needs non-empty forget and retain sets");
  }
  ParamSet params = theta_o;
  Rng order = Rng::stream(config.seed, "order");
  CyclicBatches forget(d_f.size(), config.batch_size,
                       Rng::stream(config.seed, "forget_order"));
  const double beta = config.neggrad_beta;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& rows : epoch_batches(d_r.size(), config.batch_size, order)) {
      const LabeledDataset batch_r = d_r.subset(rows);
      LossAndGrad r = net.backward(params, batch_r.features, batch_r.labels);
      double loss = r.loss;
      Gradients g = std::move(r.grads);
      if (beta > 0.0) {
        const LabeledDataset batch_f = d_f.subset(forget.next());
        LossAndGrad f = net.backward(params, batch_f.features, batch_f.labels);
        loss -= beta * f.loss;
        g = axpy(g, -beta, f.grads);
      }
      check_loss(loss, "neggrad_plus");
      params = sgd_step(std::move(params), g, config.lr);
    }
  }
  return params;
}

ParamSet negate_task_vector(const ParamSet& theta_o, const ParamSet& tau, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidInputError("alpha must be >= 0");
  return axpy(theta_o, -alpha, tau);
}

TaskVectorResult negtv(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                       const UnlearnConfig& config) {
  config.validate();
  TrainConfig ft = config.train_config();
  ft.epochs = config.tv_epochs;
  TaskVectorResult out;
  out.theta_ft = train_sgd(net, theta_o, d_f, ft);
  out.tau = axpy(out.theta_ft, -1.0, theta_o);
  out.theta_u = negate_task_vector(theta_o, out.tau, config.alpha);
  return out;
}

ElementMask saliency_mask(const Mlp& net, const ParamSet& theta_o,
                          const LabeledDataset& d_f, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidInputError("saliency fraction must lie in (0, 1]");
  }
  if (d_f.empty()) throw InvalidInputError("saliency on empty forget set");
  const LossAndGrad lg = net.backward(theta_o, d_f.features, d_f.labels);

  std::vector<double> flat;
  flat.reserve(theta_o.total_elements());
  for (const auto& t : lg.grads.tensors()) {
    for (double g : t.values) flat.push_back(std::abs(g));
  }
  const auto keep = std::min<std::size_t>(
      flat.size(),
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(flat.size()) - 1e-9)));
  std::vector<std::size_t> order(flat.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    return flat[a] > flat[b] || (flat[a] == flat[b] && a < b);
  };
  if (keep < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                     order.end(), before);
  }
  std::vector<bool> chosen(flat.size(), false);
  for (std::size_t i = 0; i < keep; ++i) chosen[order[i]] = true;

  ElementMask mask;
  std::size_t offset = 0;
  for (const auto& t : theta_o.tensors()) {
    mask.bits.emplace_back(chosen.begin() + static_cast<std::ptrdiff_t>(offset),
                           chosen.begin() + static_cast<std::ptrdiff_t>(offset + t.size()));
    offset += t.size();
  }
  return mask;
}

ParamSet salun_lite(const Mlp& net, const ParamSet& theta_o, const LabeledDataset& d_f,
                    const LabeledDataset& d_r, const UnlearnConfig& config) {
  config.validate();
  const ElementMask mask = saliency_mask(net, theta_o, d_f, config.saliency_fraction);
  return train_sgd(net, theta_o, concat(d_r, relabel_forget(d_f, config.seed)),
                   config.train_config(), &mask);
}

EntanglementReport entanglement_probe(const Mlp& net, const ParamSet& theta_o,
                                      const ParamSet& tau, double alpha,
                                      const LabeledDataset& d_r) {
  EntanglementReport rep;
  rep.alpha = alpha;
  if (d_r.empty()) return rep;
  const ParamSet moved = negate_task_vector(theta_o, tau, alpha);
  const Matrix a = net.forward(theta_o, d_r.features);
  const Matrix b = net.forward(moved, d_r.features);
  std::size_t flips = 0;
  double total = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sq = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double d = a(r, c) - b(r, c);
      sq += d * d;
    }
    const double dist = std::sqrt(sq);
    total += dist;
    rep.max_logit_l2 = std::max(rep.max_logit_l2, dist);
    if (argmax(a.row(r)) != argmax(b.row(r))) ++flips;
  }
  rep.mean_logit_l2 = total / static_cast<double>(a.rows());
  rep.flip_rate = static_cast<double>(flips) / static_cast<double>(a.rows());
  return rep;
}

}  // namespace mcu
