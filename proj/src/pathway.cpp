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

#include "mculab/pathway.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mculab/batching.hpp"
#include "mculab/data.hpp"
#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {

void ReferenceAccuracies::validate() const {
  auto ok = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!ok(acc_train_o) || !ok(acc_v_o)) {
    throw InvalidInputError("reference accuracies must lie in (0, 1]");
  }
}

void BezierCurve::validate() const {
  require_congruent(theta_o, theta_c, "bezier curve (o, c)");
  require_congruent(theta_o, theta_p, "bezier curve (o, p)");
}

double control_weight(double t) { return 2.0 * (1.0 - t) * t; }

ParamSet bezier_point(const BezierCurve& curve, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidInputError("curve position t=" + std::to_string(t) +
                            " outside [0, 1]");
  }
  curve.validate();
  const double s = 1.0 - t;
  const double w_o = s * s;
  const double w_c = 2.0 * s * t;
  const double w_p = t * t;
  ParamSet out = curve.theta_o;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& v = out[k].values;
    const auto& o = curve.theta_o[k].values;
    const auto& c = curve.theta_c[k].values;
    const auto& p = curve.theta_p[k].values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = (w_o * o[i] + w_c * c[i]) + w_p * p[i];
    }
  }
  return out;
}

ParamSet init_control(const ParamSet& theta_o, const ParamSet& theta_p) {
  require_congruent(theta_o, theta_p, "init_control");
  ParamSet out = theta_o;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& v = out[k].values;
    const auto& p = theta_p[k].values;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] + p[i]) / 2.0;
  }
  return out;
}

namespace {

McuLossResult loss_at(const Mlp& net, const ParamSet& phi, double t,
                      const LabeledDataset& batch_r, const LabeledDataset& batch_f,
                      double beta, const TensorMask* mask) {
  McuLossResult out;
  LossAndGrad r = net.backward(phi, batch_r.features, batch_r.labels, mask);
  out.retain_loss = r.loss;
  out.retain_accuracy = accuracy_from_logits(r.logits, batch_r.labels);

  Gradients grad_phi = std::move(r.grads);
  if (beta > 0.0) {
    LossAndGrad f = net.backward(phi, batch_f.features, batch_f.labels, mask);
    out.forget_loss = f.loss;
    out.forget_accuracy = accuracy_from_logits(f.logits, batch_f.labels);
    grad_phi = axpy(grad_phi, -beta, f.grads);
  } else {
    const Matrix logits = net.forward(phi, batch_f.features);
    out.forget_loss = cross_entropy(logits, batch_f.labels);
    out.forget_accuracy = accuracy_from_logits(logits, batch_f.labels);
  }
  out.loss = out.retain_loss - beta * out.forget_loss;
  if (!std::isfinite(out.loss)) throw NumericError("mcu_loss: non-finite loss");

  // d phi / d theta_c = 2(1-t)t, elementwise.
  const double w = control_weight(t);
  for (std::size_t k = 0; k < grad_phi.size(); ++k) {
    for (auto& g : grad_phi[k].values) g *= w;
  }
  out.grad_control = std::move(grad_phi);
  return out;
}

}  // namespace

McuLossResult mcu_loss(const Mlp& net, const BezierCurve& curve, double t,
                       const LabeledDataset& batch_r, const LabeledDataset& batch_f,
                       double beta, const TensorMask* mask) {
  if (batch_r.empty() || batch_f.empty()) {
    throw InvalidInputError("mcu_loss needs non-empty retain and forget batches");
  }
  if (!(beta >= 0.0)) throw InvalidInputError("beta must be non-negative");
  return loss_at(net, bezier_point(curve, t), t, batch_r, batch_f, beta, mask);
}

double adaptive_beta(double acc_uf, double acc_ur, const ReferenceAccuracies& refs) {
  if (!(refs.acc_v_o > 0.0) || !(refs.acc_train_o > 0.0)) {
    throw InvalidInputError("adaptive beta needs positive reference accuracies");
  }
  if (acc_uf <= refs.acc_v_o) return 0.0;
  const double forget_excess = (acc_uf - refs.acc_v_o) / refs.acc_v_o;
  const double retain_change = (acc_ur - refs.acc_train_o) / refs.acc_train_o;
  if (forget_excess < retain_change) return 0.1;
  return 0.5;
}

std::string_view to_string(BetaMode m) {
  return m == BetaMode::kFixed ? "fixed" : "adaptive";
}

BetaMode parse_beta_mode(std::string_view s) {
  if (s == "fixed") return BetaMode::kFixed;
  if (s == "adaptive") return BetaMode::kAdaptive;
  throw ConfigError("unknown beta mode '" + std::string(s) + "'");
}

double BetaState::update(double batch_acc_f, double batch_acc_r, double decay) {
  if (!primed) {
    running_acc_f = batch_acc_f;
    running_acc_r = batch_acc_r;
    primed = true;
  } else {
    running_acc_f = decay * running_acc_f + (1.0 - decay) * batch_acc_f;
    running_acc_r = decay * running_acc_r + (1.0 - decay) * batch_acc_r;
  }
  if (mode == BetaMode::kAdaptive) {
    beta = adaptive_beta(running_acc_f, running_acc_r, refs);
  }
  return beta;
}

void CurveTrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("curve batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("curve lr must be positive");
  if (!(retain_proportion > 0.0 && retain_proportion <= 1.0)) {
    throw ConfigError("curve retain_proportion must lie in (0, 1]");
  }
  if (!(beta >= 0.0)) throw ConfigError("curve beta must be non-negative");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
    throw ConfigError("curve ema_decay must lie in [0, 1)");
  }
}

CurveTrainResult train_curve(const Mlp& net, const ParamSet& theta_o,
                             const ParamSet& theta_p, const LabeledDataset& d_r,
                             const LabeledDataset& d_f, const ParameterMask& mask,
                             const CurveTrainConfig& config,
                             const ReferenceAccuracies& refs) {
  return train_curve(net, theta_o, theta_p, init_control(theta_o, theta_p), d_r, d_f,
                     mask, config, refs);
}

CurveTrainResult train_curve(const Mlp& net, const ParamSet& theta_o,
                             const ParamSet& theta_p, ParamSet theta_c,
                             const LabeledDataset& d_r, const LabeledDataset& d_f,
                             const ParameterMask& mask, const CurveTrainConfig& config,
                             const ReferenceAccuracies& refs) {
  config.validate();
  net.check_params(theta_o);
  BezierCurve curve{theta_o, std::move(theta_c), theta_p};
  curve.validate();
  if (mask.bits.size() != theta_o.size()) {
    throw ConfigError("train_curve: mask layout does not match parameters");
  }
  if (d_r.empty() || d_f.empty()) {
    throw InvalidInputError("train_curve needs non-empty retain and forget data");
  }
  if (config.beta_mode == BetaMode::kAdaptive) refs.validate();

  CurveTrainResult result;
  if (config.epochs == 0) {
    result.theta_c = std::move(curve.theta_c);
    return result;
  }

  const LabeledDataset retain = subsample_retain(
      d_r, config.retain_proportion, Rng::stream(config.seed, "curve.retain").next_u64());
  Rng order_rng = Rng::stream(config.seed, "curve.retain_order");
  Rng t_rng = Rng::stream(config.seed, "curve.t");
  CyclicBatches forget_batches(d_f.size(), config.batch_size,
                               Rng::stream(config.seed, "curve.forget_order"));

  BetaState beta_state;
  beta_state.mode = config.beta_mode;
  beta_state.beta = config.beta_mode == BetaMode::kFixed ? config.beta : kInitialBeta;
  beta_state.refs = refs;

  const TensorMask& bits = mask.bits;
  using Clock = std::chrono::steady_clock;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto started = Clock::now();
    for (const auto& rows : epoch_batches(retain.size(), config.batch_size, order_rng)) {
      const LabeledDataset batch_r = retain.subset(rows);
      const LabeledDataset batch_f = d_f.subset(forget_batches.next());
      const double t = t_rng.uniform();

      const ParamSet phi = bezier_point(curve, t);
      double beta = beta_state.beta;
      if (config.beta_mode == BetaMode::kAdaptive) {
        // Accuracies at the sampled curve point drive this batch's beta.
        const double acc_r =
            accuracy_from_logits(net.forward(phi, batch_r.features), batch_r.labels);
        const double acc_f =
            accuracy_from_logits(net.forward(phi, batch_f.features), batch_f.labels);
        beta = beta_state.update(acc_f, acc_r, config.ema_decay);
      }

      McuLossResult lr = loss_at(net, phi, t, batch_r, batch_f, beta, &bits);
      check_loss(lr.loss, "train_curve");
      curve.theta_c = sgd_step(std::move(curve.theta_c), lr.grad_control, config.lr, &bits);

      if (config.beta_mode == BetaMode::kFixed) {
        ++result.beta_fixed;
      } else if (beta == 0.0) {
        ++result.beta_zero;
      } else if (beta == 0.1) {
        ++result.beta_mild;
      } else {
        ++result.beta_strong;
      }
      result.last_loss = lr.loss;
      ++result.steps;
    }
    result.epoch_seconds.push_back(
        std::chrono::duration<double>(Clock::now() - started).count());
  }
  result.final_beta = beta_state.beta;
  result.theta_c = std::move(curve.theta_c);
  return result;
}

}  // namespace mcu
