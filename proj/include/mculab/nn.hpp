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

#ifndef MCULAB_NN_HPP_
#define MCULAB_NN_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mculab/dataset.hpp"
#include "mculab/matrix.hpp"

namespace mcu {

class Rng;

/// One named parameter tensor, row-major.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const Tensor&) const = default;
};

/// Ordered collection of named tensors. Every model state of one architecture
/// (original, pre-unlearning, control, any curve point) shares the same
/// tensor order and shapes.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::vector<Tensor> tensors);

  std::size_t size() const { return tensors_.size(); }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  std::size_t element_count(std::size_t i) const { return tensors_[i].size(); }
  std::size_t total_elements() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Same names, order and shapes.
  bool congruent(const ParamSet& other) const;
  bool all_finite() const;
  /// Bitwise equality of every value (distinguishes -0.0 and NaN payloads).
  bool bit_identical(const ParamSet& other) const;

  static ParamSet zeros_like(const ParamSet& like);

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<Tensor> tensors_;
};

/// Gradient of a scalar loss; same layout as the ParamSet it was taken at.
using Gradients = ParamSet;

/// Throws ConfigError unless `a` and `b` are congruent.
void require_congruent(const ParamSet& a, const ParamSet& b, const char* where);

/// Whole-tensor selection bits; 1 = trainable.
class TensorMask {
 public:
  TensorMask() = default;
  explicit TensorMask(std::vector<bool> bits) : bits_(std::move(bits)) {}

  static TensorMask all(std::size_t n) { return TensorMask(std::vector<bool>(n, true)); }
  static TensorMask none(std::size_t n) { return TensorMask(std::vector<bool>(n, false)); }

  std::size_t size() const { return bits_.size(); }
  bool selected(std::size_t i) const { return bits_[i]; }
  std::size_t count() const;
  const std::vector<bool>& bits() const { return bits_; }

  bool operator==(const TensorMask&) const = default;

 private:
  std::vector<bool> bits_;
};

/// Per-element selection bits with the layout of a ParamSet.
struct ElementMask {
  std::vector<std::vector<bool>> bits;

  std::size_t count() const;
};

enum class Activation { kRelu, kTanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

/// Layer widths from input to output; the last width is the class count.
struct Architecture {
  std::vector<std::size_t> widths;
  Activation activation = Activation::kRelu;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t class_count() const { return widths.back(); }
  std::size_t layer_count() const { return widths.size() - 1; }

  /// Throws ConfigError on fewer than two widths or a zero width.
  void validate() const;
  std::string describe() const;  // "2-64-64-4/relu"

  bool operator==(const Architecture&) const = default;
};

/// Loss value, gradient and the logits computed on the way.
struct LossAndGrad {
  double loss = 0.0;
  Gradients grads;
  Matrix logits;
};

/// Fully connected classifier with hidden activations and a linear output.
///
/// Tensor layout: for layer l = 1..L, "fc<l>.weight" with shape [out, in]
/// followed by "fc<l>.bias" with shape [out].
class Mlp {
 public:
  explicit Mlp(Architecture arch);

  const Architecture& architecture() const { return arch_; }
  std::size_t tensor_count() const { return 2 * arch_.layer_count(); }

  /// Weights ~ N(0, gain/fan_in) with He gain for relu and 1 for tanh;
  /// zero biases.
  ParamSet init(Rng& rng) const;
  ParamSet zeros() const;

  /// Throws ConfigError when `params` does not match the architecture.
  void check_params(const ParamSet& params) const;

  Matrix forward(const ParamSet& params, const Matrix& inputs) const;

  /// Mean cross-entropy and its exact gradient. When `wanted` is given, only
  /// selected tensors receive gradients (the rest stay zero) and
  /// back-propagation stops below the lowest selected layer.
  LossAndGrad backward(const ParamSet& params, const Matrix& inputs,
                       std::span<const int> labels,
                       const TensorMask* wanted = nullptr) const;

  double accuracy(const ParamSet& params, const LabeledDataset& data) const;
  std::vector<int> predict(const ParamSet& params, const Matrix& inputs) const;

 private:
  void check_inputs(const Matrix& inputs) const;

  Architecture arch_;
};

/// Mean over rows of -log softmax(logits)[label].
double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Row-wise softmax.
Matrix softmax(const Matrix& logits);

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> row);

/// Argmax-correct fraction for precomputed logits.
double accuracy_from_logits(const Matrix& logits, std::span<const int> labels);

/// p <- p - lr * g on every tensor, or only on tensors selected by `mask`.
/// Unselected tensors are copied bit-for-bit.
ParamSet sgd_step(ParamSet params, const Gradients& grads, double lr,
                  const TensorMask* mask = nullptr);

/// Element-level variant: only selected elements move.
ParamSet sgd_step(ParamSet params, const Gradients& grads, double lr,
                  const ElementMask& mask);

/// a + scale * b, elementwise.
ParamSet axpy(const ParamSet& a, double scale, const ParamSet& b);

}  // namespace mcu

#endif  // MCULAB_NN_HPP_
