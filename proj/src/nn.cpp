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

#include "mculab/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {

// ---------------------------------------------------------------------------
// ParamSet

ParamSet::ParamSet(std::vector<Tensor> tensors) : tensors_(std::move(tensors)) {
  for (const auto& t : tensors_) {
    std::size_t n = 1;
    for (auto d : t.shape) n *= d;
    if (n != t.values.size()) {
      throw ConfigError("tensor '" + t.name + "' shape does not match its " +
                        std::to_string(t.values.size()) + " values");
    }
  }
}

std::size_t ParamSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

std::optional<std::size_t> ParamSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name == name) return i;
  }
  return std::nullopt;
}

bool ParamSet::congruent(const ParamSet& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name != other.tensors_[i].name ||
        tensors_[i].shape != other.tensors_[i].shape) {
      return false;
    }
  }
  return true;
}

bool ParamSet::all_finite() const {
  for (const auto& t : tensors_) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool ParamSet::bit_identical(const ParamSet& other) const {
  if (!congruent(other)) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto& a = tensors_[i].values;
    const auto& b = other.tensors_[i].values;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (std::bit_cast<std::uint64_t>(a[j]) != std::bit_cast<std::uint64_t>(b[j])) {
        return false;
      }
    }
  }
  return true;
}

ParamSet ParamSet::zeros_like(const ParamSet& like) {
  std::vector<Tensor> out = like.tensors_;
  for (auto& t : out) std::fill(t.values.begin(), t.values.end(), 0.0);
  return ParamSet(std::move(out));
}

void require_congruent(const ParamSet& a, const ParamSet& b, const char* where) {
  if (!a.congruent(b)) {
    throw ConfigError(std::string(where) + ": parameter layouts differ");
  }
}

std::size_t TensorMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::size_t ElementMask::count() const {
  std::size_t n = 0;
  for (const auto& b : bits) n += static_cast<std::size_t>(std::count(b.begin(), b.end(), true));
  return n;
}

// ---------------------------------------------------------------------------
// Architecture

std::string_view to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

void Architecture::validate() const {
  if (widths.size() < 2) {
    throw ConfigError("architecture needs at least input and output widths");
  }
  for (auto w : widths) {
    if (w == 0) throw ConfigError("architecture widths must be positive");
  }
  if (widths.back() < 2) {
    throw ConfigError("classifier needs at least two classes");
  }
}

std::string Architecture::describe() const {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(widths[i]);
  }
  s += '/';
  s += to_string(activation);
  return s;
}

// ---------------------------------------------------------------------------
// Mlp

namespace {

double activate(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the pre-activation z and the output h = act(z).
double activate_grad(Activation a, double z, double h) {
  if (a == Activation::kRelu) return z > 0.0 ? 1.0 : 0.0;
  return 1.0 - h * h;
}

// out = in * W^T + b
void affine(const Matrix& in, const Tensor& w, const Tensor& b, Matrix& out) {
  const std::size_t n_in = in.cols();
  const std::size_t n_out = b.size();
  out = Matrix(in.rows(), n_out);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    const double* x = in.data().data() + r * n_in;
    double* z = out.data().data() + r * n_out;
    for (std::size_t o = 0; o < n_out; ++o) {
      const double* wr = w.values.data() + o * n_in;
      double acc = 0.0;
      for (std::size_t i = 0; i < n_in; ++i) acc += x[i] * wr[i];
      z[o] = acc + b.values[o];
    }
  }
}

}  // namespace

Mlp::Mlp(Architecture arch) : arch_(std::move(arch)) { arch_.validate(); }

ParamSet Mlp::init(Rng& rng) const {
  std::vector<Tensor> tensors;
  const double gain = arch_.activation == Activation::kRelu ? 2.0 : 1.0;
  for (std::size_t l = 0; l < arch_.layer_count(); ++l) {
    const std::size_t n_in = arch_.widths[l];
    const std::size_t n_out = arch_.widths[l + 1];
    const double stddev = std::sqrt(gain / static_cast<double>(n_in));
    Tensor w{"fc" + std::to_string(l + 1) + ".weight", {n_out, n_in}, {}};
    w.values.resize(n_out * n_in);
    for (auto& v : w.values) v = stddev * rng.normal();
    Tensor b{"fc" + std::to_string(l + 1) + ".bias", {n_out},
             std::vector<double>(n_out, 0.0)};
    tensors.push_back(std::move(w));
    tensors.push_back(std::move(b));
  }
  return ParamSet(std::move(tensors));
}

ParamSet Mlp::zeros() const {
  Rng unused(0);
  return ParamSet::zeros_like(init(unused));
}

void Mlp::check_params(const ParamSet& params) const {
  if (params.size() != tensor_count()) {
    throw ConfigError("expected " + std::to_string(tensor_count()) +
                      " tensors for " + arch_.describe() + ", got " +
                      std::to_string(params.size()));
  }
  for (std::size_t l = 0; l < arch_.layer_count(); ++l) {
    const auto& w = params[2 * l];
    const auto& b = params[2 * l + 1];
    const std::vector<std::size_t> ws{arch_.widths[l + 1], arch_.widths[l]};
    const std::vector<std::size_t> bs{arch_.widths[l + 1]};
    if (w.shape != ws || b.shape != bs) {
      throw ConfigError("layer " + std::to_string(l + 1) +
                        " shape mismatch for " + arch_.describe());
    }
  }
}

void Mlp::check_inputs(const Matrix& inputs) const {
  if (inputs.cols() != arch_.input_dim()) {
    throw ConfigError("input feature dim " + std::to_string(inputs.cols()) +
                      " does not match architecture input " +
                      std::to_string(arch_.input_dim()));
  }
}

Matrix Mlp::forward(const ParamSet& params, const Matrix& inputs) const {
  check_params(params);
  check_inputs(inputs);
  const std::size_t layers = arch_.layer_count();
  Matrix h = inputs;
  Matrix z;
  for (std::size_t l = 0; l < layers; ++l) {
    affine(h, params[2 * l], params[2 * l + 1], z);
    if (l + 1 == layers) return z;
    for (auto& v : z.data()) v = activate(arch_.activation, v);
    std::swap(h, z);
  }
  return z;
}

LossAndGrad Mlp::backward(const ParamSet& params, const Matrix& inputs,
                          std::span<const int> labels,
                          const TensorMask* wanted) const {
  check_params(params);
  check_inputs(inputs);
  if (labels.size() != inputs.rows()) {
    throw ConfigError("label count does not match batch rows");
  }
  if (labels.empty()) throw InvalidInputError("backward on empty batch");
  if (wanted && wanted->size() != tensor_count()) {
    throw ConfigError("gradient mask layout does not match parameters");
  }

  const std::size_t layers = arch_.layer_count();
  auto want = [&](std::size_t t) { return wanted == nullptr || wanted->selected(t); };

  // Forward with cached activations: acts[l] is the input to layer l,
  // pre[l] its pre-activation (hidden layers only).
  std::vector<Matrix> acts(layers);
  std::vector<Matrix> pre(layers);
  acts[0] = inputs;
  Matrix logits;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z;
    affine(acts[l], params[2 * l], params[2 * l + 1], z);
    if (l + 1 == layers) {
      logits = std::move(z);
    } else {
      Matrix h = z;
      for (auto& v : h.data()) v = activate(arch_.activation, v);
      pre[l] = std::move(z);
      acts[l + 1] = std::move(h);
    }
  }

  LossAndGrad out;
  out.loss = cross_entropy(logits, labels);
  out.grads = ParamSet::zeros_like(params);

  std::size_t lowest = layers;
  for (std::size_t l = 0; l < layers; ++l) {
    if (want(2 * l) || want(2 * l + 1)) {
      lowest = l;
      break;
    }
  }
  if (lowest == layers) {
    out.logits = std::move(logits);
    return out;
  }

  // dL/dz for the output layer: (softmax - onehot) / batch.
  const std::size_t batch = inputs.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  Matrix delta = softmax(logits);
  for (std::size_t r = 0; r < batch; ++r) {
    delta(r, static_cast<std::size_t>(labels[r])) -= 1.0;
    for (auto& v : delta.row(r)) v *= inv_batch;
  }

  for (std::size_t l = layers; l-- > lowest;) {
    const Matrix& a = acts[l];
    const std::size_t n_in = a.cols();
    const std::size_t n_out = delta.cols();
    if (want(2 * l)) {
      auto& gw = out.grads[2 * l].values;
      for (std::size_t r = 0; r < batch; ++r) {
        const double* ar = a.data().data() + r * n_in;
        const double* dr = delta.data().data() + r * n_out;
        for (std::size_t o = 0; o < n_out; ++o) {
          const double d = dr[o];
          double* g = gw.data() + o * n_in;
          for (std::size_t i = 0; i < n_in; ++i) g[i] += d * ar[i];
        }
      }
    }
    if (want(2 * l + 1)) {
      auto& gb = out.grads[2 * l + 1].values;
      for (std::size_t r = 0; r < batch; ++r) {
        for (std::size_t o = 0; o < n_out; ++o) gb[o] += delta(r, o);
      }
    }
    if (l == lowest) break;

    // Propagate to the previous layer's pre-activation.
    const auto& w = params[2 * l].values;
    Matrix next(batch, n_in);
    for (std::size_t r = 0; r < batch; ++r) {
      const double* dr = delta.data().data() + r * n_out;
      double* nr = next.data().data() + r * n_in;
      for (std::size_t o = 0; o < n_out; ++o) {
        const double d = dr[o];
        const double* wr = w.data() + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) nr[i] += d * wr[i];
      }
    }
    const Matrix& z = pre[l - 1];
    for (std::size_t k = 0; k < next.data().size(); ++k) {
      next.data()[k] *= activate_grad(arch_.activation, z.data()[k], a.data()[k]);
    }
    delta = std::move(next);
  }

  out.logits = std::move(logits);
  return out;
}

double Mlp::accuracy(const ParamSet& params, const LabeledDataset& data) const {
  if (data.empty()) throw InvalidInputError("accuracy on empty dataset");
  return accuracy_from_logits(forward(params, data.features), data.labels);
}

std::vector<int> Mlp::predict(const ParamSet& params, const Matrix& inputs) const {
  Matrix logits = forward(params, inputs);
  std::vector<int> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) out[r] = argmax(logits.row(r));
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (logits.rows() == 0) throw InvalidInputError("cross_entropy on empty batch");
  if (labels.size() != logits.rows()) {
    throw ConfigError("label count does not match logits rows");
  }
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto z = logits.row(r);
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= z.size()) {
      throw InvalidInputError("label " + std::to_string(y) + " out of range");
    }
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    total += (m + std::log(s)) - z[static_cast<std::size_t>(y)];
  }
  return total / static_cast<double>(logits.rows());
}

Matrix softmax(const Matrix& logits) {
  Matrix p = logits;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    auto row = p.row(r);
    const double m = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (auto& v : row) {
      v = std::exp(v - m);
      s += v;
    }
    for (auto& v : row) v /= s;
  }
  return p;
}

int argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return static_cast<int>(best);
}

double accuracy_from_logits(const Matrix& logits, std::span<const int> labels) {
  if (logits.rows() == 0) throw InvalidInputError("accuracy on empty dataset");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (argmax(logits.row(r)) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

ParamSet sgd_step(ParamSet params, const Gradients& grads, double lr,
                  const TensorMask* mask) {
  require_congruent(params, grads, "sgd_step");
  if (mask && mask->size() != params.size()) {
    throw ConfigError("sgd_step: mask layout does not match parameters");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (mask && !mask->selected(t)) continue;
    const auto& g = grads[t].values;
    for (double v : g) {
      if (!std::isfinite(v)) {
        throw NumericError("sgd_step: non-finite gradient in " + grads[t].name);
      }
    }
    auto& p = params[t].values;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
  }
  return params;
}

ParamSet sgd_step(ParamSet params, const Gradients& grads, double lr,
                  const ElementMask& mask) {
  require_congruent(params, grads, "sgd_step");
  if (mask.bits.size() != params.size()) {
    throw ConfigError("sgd_step: element mask layout does not match parameters");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    const auto& g = grads[t].values;
    const auto& m = mask.bits[t];
    if (m.size() != g.size()) {
      throw ConfigError("sgd_step: element mask size mismatch in " + grads[t].name);
    }
    auto& p = params[t].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!m[i]) continue;
      if (!std::isfinite(g[i])) {
        throw NumericError("sgd_step: non-finite gradient in " + grads[t].name);
      }
      p[i] -= lr * g[i];
    }
  }
  return params;
}

ParamSet axpy(const ParamSet& a, double scale, const ParamSet& b) {
  require_congruent(a, b, "axpy");
  ParamSet out = a;
  for (std::size_t t = 0; t < out.size(); ++t) {
    auto& o = out[t].values;
    const auto& bv = b[t].values;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += scale * bv[i];
  }
  return out;
}

}  // namespace mcu
