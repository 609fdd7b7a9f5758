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

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mculab/errors.hpp"
#include "mculab/nn.hpp"
#include "mculab/params_io.hpp"
#include "mculab/rng.hpp"
#include "test_util.hpp"

namespace mcu {
namespace {

using testing::rel_err;

// Reference cases written by tests/golden/gen_forward.py.
struct GoldenCase {
  std::string name;
  Architecture arch;
  ParamSet params;
  Matrix inputs;
  std::vector<int> labels;
  Matrix logits;
  double loss = 0.0;
  std::map<std::string, std::vector<double>> grads;
};

std::vector<double> read_values(std::istringstream& in) {
  std::string colon;
  in >> colon;
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

std::vector<GoldenCase> load_golden() {
  std::ifstream in(testing::golden_dir() / "forward.txt");
  if (!in) throw IoError("missing forward.txt");
  std::vector<GoldenCase> cases;
  std::vector<Tensor> tensors;
  GoldenCase cur;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "case") {
      std::string act;
      ls >> cur.name >> act;
      cur.arch.activation = parse_activation(act);
      std::size_t w;
      while (ls >> w) cur.arch.widths.push_back(w);
    } else if (tag == "tensor") {
      Tensor t;
      ls >> t.name;
      std::string tok;
      while (ls >> tok && tok != ":") t.shape.push_back(std::stoul(tok));
      double v;
      while (ls >> v) t.values.push_back(v);
      tensors.push_back(std::move(t));
    } else if (tag == "inputs" || tag == "logits") {
      std::size_t r, c;
      ls >> r >> c;
      Matrix m(r, c, read_values(ls));
      (tag == "inputs" ? cur.inputs : cur.logits) = std::move(m);
    } else if (tag == "labels") {
      std::string colon;
      ls >> colon;
      int y;
      while (ls >> y) cur.labels.push_back(y);
    } else if (tag == "loss") {
      cur.loss = read_values(ls).at(0);
    } else if (tag == "grad") {
      std::string name;
      ls >> name;
      cur.grads[name] = read_values(ls);
    } else if (tag == "end") {
      cur.params = ParamSet(std::move(tensors));
      tensors.clear();
      cases.push_back(std::move(cur));
      cur = GoldenCase{};
    }
  }
  return cases;
}

TEST(MlpGolden, ForwardMatchesNumpy) {
  const auto cases = load_golden();
  ASSERT_EQ(cases.size(), 4u);
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    Mlp net(c.arch);
    const Matrix logits = net.forward(c.params, c.inputs);
    ASSERT_EQ(logits.rows(), c.logits.rows());
    ASSERT_EQ(logits.cols(), c.logits.cols());
    for (std::size_t i = 0; i < logits.data().size(); ++i) {
      EXPECT_LE(rel_err(logits.data()[i], c.logits.data()[i], 1e-12), 1e-12) << i;
    }
  }
}

TEST(MlpGolden, LossMatchesHighPrecision) {
  for (const auto& c : load_golden()) {
    SCOPED_TRACE(c.name);
    EXPECT_LE(rel_err(cross_entropy(c.logits, c.labels), c.loss), 1e-14);
  }
}

TEST(MlpGolden, GradientsMatchAutograd) {
  for (const auto& c : load_golden()) {
    SCOPED_TRACE(c.name);
    Mlp net(c.arch);
    const auto lg = net.backward(c.params, c.inputs, c.labels);
    EXPECT_LE(rel_err(lg.loss, c.loss), 1e-12);
    for (const auto& t : lg.grads.tensors()) {
      const auto& want = c.grads.at(t.name);
      ASSERT_EQ(t.values.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_LE(std::abs(t.values[i] - want[i]),
                  1e-12 * std::max(1.0, std::abs(want[i])))
            << t.name << "[" << i << "]";
      }
    }
  }
}

TEST(CrossEntropy, UniformLogitsGiveLogClassCount) {
  Matrix z(3, 5, 0.7);
  std::vector<int> y = {0, 4, 2};
  EXPECT_NEAR(cross_entropy(z, y), std::log(5.0), 1e-15);
}

TEST(CrossEntropy, HugeLogitsStayFinite) {
  Matrix z(1, 3, std::vector<double>{1000.0, -1000.0, 0.0});
  EXPECT_NEAR(cross_entropy(z, std::vector<int>{0}), 0.0, 1e-300);
  EXPECT_NEAR(cross_entropy(z, std::vector<int>{1}), 2000.0, 1e-9);
}

TEST(CrossEntropy, RejectsBadInput) {
  Matrix z(2, 3);
  EXPECT_THROW(cross_entropy(z, std::vector<int>{0}), ConfigError);
  EXPECT_THROW(cross_entropy(z, std::vector<int>{0, 3}), InvalidInputError);
  EXPECT_THROW(cross_entropy(Matrix(0, 3), std::vector<int>{}), InvalidInputError);
}

TEST(Softmax, RowsSumToOne) {
  Matrix z(2, 3, std::vector<double>{1, 2, 3, -5, 0, 800});
  const Matrix p = softmax(z);
  for (std::size_t r = 0; r < 2; ++r) {
    double s = 0;
    for (double v : p.row(r)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
  EXPECT_NEAR(p(1, 2), 1.0, 1e-15);
}

TEST(Argmax, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax(std::vector<double>{1, 3, 3, 2}), 1);
  EXPECT_EQ(argmax(std::vector<double>{0, 0, 0}), 0);
  EXPECT_EQ(argmax(std::vector<double>{-1, -2, -0.5}), 2);
}

// Central differences on a smooth net (tanh keeps the loss differentiable).
TEST(MlpBackward, MatchesFiniteDifferences) {
  Mlp net({{2, 16, 3}, Activation::kTanh});
  Rng rng(5);
  const ParamSet p = net.init(rng);
  const auto data = testing::random_dataset(12, 2, 3, rng);
  const auto lg = net.backward(p, data.features, data.labels);
  const double eps = 1e-5;
  for (std::size_t ti = 0; ti < p.size(); ++ti) {
    for (std::size_t e = 0; e < p[ti].size(); ++e) {
      ParamSet hi = p, lo = p;
      hi[ti].values[e] += eps;
      lo[ti].values[e] -= eps;
      const double fd = (cross_entropy(net.forward(hi, data.features), data.labels) -
                         cross_entropy(net.forward(lo, data.features), data.labels)) /
                        (2 * eps);
      EXPECT_LE(rel_err(lg.grads[ti].values[e], fd, 1e-6), 1e-4)
          << p[ti].name << "[" << e << "]";
    }
  }
}

TEST(MlpBackward, MaskedGradientsMatchFullOnSelected) {
  Mlp net({{3, 8, 8, 4}, Activation::kRelu});
  Rng rng(9);
  const ParamSet p = net.init(rng);
  const auto data = testing::random_dataset(20, 3, 4, rng);
  const auto full = net.backward(p, data.features, data.labels);
  TensorMask wanted(std::vector<bool>{false, false, true, false, false, true});
  const auto part = net.backward(p, data.features, data.labels, &wanted);
  EXPECT_EQ(part.loss, full.loss);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (wanted.selected(i)) {
      EXPECT_EQ(part.grads[i].values, full.grads[i].values) << i;
    } else {
      for (double v : part.grads[i].values) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(MlpBackward, RejectsMismatchedInputs) {
  Mlp net({{2, 4, 3}, Activation::kRelu});
  Rng rng(1);
  const ParamSet p = net.init(rng);
  EXPECT_THROW(net.backward(p, Matrix(2, 2), std::vector<int>{0}), ConfigError);
  EXPECT_THROW(net.backward(p, Matrix(0, 2), std::vector<int>{}), InvalidInputError);
  EXPECT_THROW(net.forward(p, Matrix(2, 5)), ConfigError);
  Mlp other({{2, 5, 3}, Activation::kRelu});
  EXPECT_THROW(other.forward(p, Matrix(1, 2)), ConfigError);
}

TEST(Architecture, ValidatesWidths) {
  EXPECT_THROW(Mlp({{4}, Activation::kRelu}), ConfigError);
  EXPECT_THROW(Mlp({{4, 0, 2}, Activation::kRelu}), ConfigError);
  EXPECT_EQ((Architecture{{2, 64, 64, 4}, Activation::kRelu}).describe(), "2-64-64-4/relu");
}

TEST(Mlp, InitLayoutAndDeterminism) {
  Mlp net({{2, 5, 3}, Activation::kRelu});
  Rng a(3), b(3);
  const ParamSet p = net.init(a);
  EXPECT_TRUE(p.bit_identical(net.init(b)));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0].name, "fc1.weight");
  EXPECT_EQ(p[0].shape, (std::vector<std::size_t>{5, 2}));
  EXPECT_EQ(p[3].name, "fc2.bias");
  for (double v : p[1].values) EXPECT_EQ(v, 0.0);
}

TEST(SgdStep, UnselectedTensorsCopiedBitForBit) {
  Mlp net({{2, 4, 3}, Activation::kRelu});
  Rng rng(2);
  ParamSet p = net.init(rng);
  p[1].values[0] = -0.0;
  const ParamSet g = testing::random_like(p, rng);
  TensorMask m(std::vector<bool>{true, false, true, false});
  const ParamSet q = sgd_step(p, g, 0.1, &m);
  EXPECT_EQ(q[0].values[0], p[0].values[0] - 0.1 * g[0].values[0]);
  EXPECT_TRUE(std::signbit(q[1].values[0]));
  EXPECT_EQ(q[3].values, p[3].values);
}

TEST(SgdStep, ElementMaskMovesOnlySelected) {
  ParamSet p({Tensor{"w", {3}, {1, 2, 3}}});
  ParamSet g({Tensor{"w", {3}, {1, 1, 1}}});
  ElementMask m{{{true, false, true}}};
  const ParamSet q = sgd_step(p, g, 0.5, m);
  EXPECT_EQ(q[0].values, (std::vector<double>{0.5, 2, 2.5}));
}

TEST(ParamSet, CongruenceAndBitIdentity) {
  ParamSet a({Tensor{"w", {2}, {0.0, 1.0}}});
  ParamSet b({Tensor{"w", {2}, {-0.0, 1.0}}});
  ParamSet c({Tensor{"v", {2}, {0.0, 1.0}}});
  EXPECT_TRUE(a.congruent(b));
  EXPECT_FALSE(a.congruent(c));
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a.bit_identical(b));
  EXPECT_THROW(axpy(a, 1.0, c), ConfigError);
  EXPECT_EQ(axpy(a, 2.0, b)[0].values, (std::vector<double>{0.0, 3.0}));
}

TEST(ParamsIo, RoundTripIsBitExact) {
  Mlp net({{2, 4, 3}, Activation::kTanh});
  Rng rng(4);
  ParamSet p = net.init(rng);
  p[1].values[2] = -0.0;
  p[0].values[1] = std::numeric_limits<double>::denorm_min();
  const auto dir = testing::scratch_dir("params_io");
  save_params(dir / "p.params", p);
  EXPECT_TRUE(load_params(dir / "p.params").bit_identical(p));
  EXPECT_EQ(params_digest(p), params_digest(decode_params(encode_params(p))));
}

TEST(ParamsIo, RejectsCorruptInput) {
  EXPECT_THROW(decode_params("not a params file"), IoError);
  ParamSet p({Tensor{"w", {2}, {1.0, 2.0}}});
  std::string bytes = encode_params(p);
  EXPECT_THROW(decode_params(bytes.substr(0, bytes.size() - 3)), IoError);
  // A missing checkpoint is an upstream-stage problem, not an I/O fault.
  EXPECT_THROW(load_params("/nonexistent/dir/p.params"), ConfigError);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a = Rng::stream(7, "init"), b = Rng::stream(7, "init");
  Rng c = Rng::stream(7, "order"), d = Rng::stream(8, "init");
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(Rng, DrawsStayInRange) {
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
  }
  auto perm = r.permutation(50);
  std::sort(perm.begin(), perm.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(perm[i], i);
}

}  // namespace
}  // namespace mcu
