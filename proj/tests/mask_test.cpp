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
#include <limits>

#include "json.hpp"
#include "mculab/data.hpp"
#include "mculab/errors.hpp"
#include "mculab/mask.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mcu {
namespace {

ImportanceScores scores(std::vector<double> v) {
  ImportanceScores s;
  for (std::size_t i = 0; i < v.size(); ++i) s.names.push_back("t" + std::to_string(i));
  s.values = std::move(v);
  return s;
}

std::vector<bool> bits(std::initializer_list<int> v) {
  std::vector<bool> out;
  for (int b : v) out.push_back(b != 0);
  return out;
}

TEST(Importance, HandComputedNormOverCount) {
  Gradients g({Tensor{"w", {2, 2}, {3.0, 0.0, 0.0, 4.0}}, Tensor{"b", {2}, {0.0, 0.0}}});
  const auto s = importance_from_grads(g);
  EXPECT_EQ(s.values[0], 5.0 / 4.0);
  EXPECT_EQ(s.values[1], 0.0);
  EXPECT_EQ(s.names[0], "w");
}

TEST(Importance, NonFiniteGradientIsNumericError) {
  Gradients g({Tensor{"w", {1}, {std::numeric_limits<double>::infinity()}}});
  EXPECT_THROW(importance_from_grads(g), NumericError);
}

TEST(Importance, EqualsGradientOfWholeSetMeanLoss) {
  Mlp net({{2, 6, 3}, Activation::kTanh});
  Rng rng(3);
  const ParamSet p = net.init(rng);
  const auto d = testing::random_dataset(37, 2, 3, rng);
  const auto whole = importance_from_grads(net.backward(p, d.features, d.labels).grads);
  const auto batched = importance(net, p, d, 8);
  for (std::size_t i = 0; i < whole.size(); ++i) {
    EXPECT_NEAR(batched.values[i], whole.values[i], 1e-14 * (1 + whole.values[i]));
  }
}

TEST(Importance, DuplicatedDataLeavesScoresUnchanged) {
  Mlp net({{2, 6, 3}, Activation::kRelu});
  Rng rng(4);
  const ParamSet p = net.init(rng);
  const auto d = testing::random_dataset(40, 2, 3, rng);
  const auto once = importance(net, p, d, 40);
  const auto twice = importance(net, p, concat(d, d), 40);
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_NEAR(twice.values[i], once.values[i], 1e-14 * (1 + once.values[i]));
  }
}

TEST(Importance, ZeroGradientsGiveZeroScores) {
  Mlp net({{2, 4, 3}, Activation::kRelu});
  const ParamSet p = net.zeros();
  for (double v : importance_from_grads(ParamSet::zeros_like(p)).values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(importance(net, p, LabeledDataset{Matrix(0, 2), {}, 3}), InvalidInputError);
}

TEST(SelectionCount, CeilingWithGuard) {
  EXPECT_EQ(selection_count(0.1, 30), 3u);
  EXPECT_EQ(selection_count(0.1, 10), 1u);
  EXPECT_EQ(selection_count(0.25, 4), 1u);
  EXPECT_EQ(selection_count(0.26, 4), 2u);
  EXPECT_EQ(selection_count(0.0, 8), 0u);
  EXPECT_EQ(selection_count(1.0, 8), 8u);
  EXPECT_EQ(selection_count(1.0 / 3.0, 3), 1u);
}

TEST(FilterMask, Examples) {
  EXPECT_EQ(filter_mask(scores({0.1, 0.2, 0.3, 0.4}), 0.25).bits.bits(), bits({1, 1, 1, 0}));
  EXPECT_EQ(filter_mask(scores({0.1, 0.2, 0.3}), 0.0).bits.bits(), bits({1, 1, 1}));
  const auto ten = filter_mask(scores({9, 8, 7, 6, 5, 4, 3, 2, 1, 0}), 0.1);
  EXPECT_EQ(ten.bits.count(), 9u);
  EXPECT_FALSE(ten.bits.selected(0));
  EXPECT_EQ(ten.threshold, 9.0);
  EXPECT_THROW(filter_mask(scores({1, 2}), 1.0), InvalidInputError);
}

TEST(ReserveMask, Examples) {
  EXPECT_EQ(reserve_mask(scores({5, 1, 3}), 1.0 / 3.0).bits.bits(), bits({1, 0, 0}));
  EXPECT_EQ(reserve_mask(scores({5, 1, 3}), 1.0).bits.bits(), bits({1, 1, 1}));
  EXPECT_EQ(reserve_mask(scores({2, 2, 2, 2}), 0.5).bits.bits(), bits({1, 1, 0, 0}));
  EXPECT_THROW(reserve_mask(scores({1}), 0.0), InvalidInputError);
}

TEST(Combine, AndTruthTable) {
  EXPECT_EQ(combine(TensorMask(bits({1, 1, 0, 0})), TensorMask(bits({1, 0, 1, 0}))).bits(),
            bits({1, 0, 0, 0}));
  EXPECT_EQ(combine(TensorMask::all(3), TensorMask::all(3)), TensorMask::all(3));
  EXPECT_THROW(combine(TensorMask::all(3), TensorMask::all(2)), ConfigError);
}

// Random score vectors with heavy ties against the rank oracle.
TEST(MaskOracle, SelectionsMatchRankOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    std::vector<double> s_r(n), s_f(n);
    const bool ties = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s_r[i] = ties ? static_cast<double>(rng.below(4)) : rng.uniform();
      s_f[i] = ties ? static_cast<double>(rng.below(3)) : rng.uniform();
    }
    const std::size_t kr_num = rng.below(20), k_num = 1 + rng.below(20);
    const auto m_r = filter_mask(scores(s_r), kr_num / 20.0);
    const auto m_f = reserve_mask(scores(s_f), k_num / 20.0);

    auto want_r = oracle::top_by_rank(s_r, oracle::count_for(kr_num, 20, n));
    want_r.flip();
    const auto want_f = oracle::top_by_rank(s_f, oracle::count_for(k_num, 20, n));
    ASSERT_EQ(m_r.bits.bits(), want_r) << trial;
    ASSERT_EQ(m_f.bits.bits(), want_f) << trial;
    const auto m = combine(m_r.bits, m_f.bits);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(m.selected(i), want_r[i] && want_f[i]);
    }
    EXPECT_LE(m.count(), std::min(m_r.bits.count(), m_f.bits.count()));
  }
}

TEST(MaskOracle, ThresholdReproducesSelection) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> s(n);
    for (auto& v : s) v = static_cast<double>(rng.below(5));
    const auto sel = reserve_mask(scores(s), (1 + rng.below(10)) / 10.0);
    ASSERT_EQ(select_by_threshold(s, sel.threshold, sel.count), sel.bits.bits());
  }
}

TEST(BuildMask, FrozenAtOriginalAndSerialisable) {
  Mlp net({{2, 8, 8, 4}, Activation::kRelu});
  Rng rng(8);
  const ParamSet p = net.init(rng);
  const auto d_r = testing::random_dataset(60, 2, 4, rng);
  const auto d_f = testing::random_dataset(20, 2, 4, rng);
  const auto m = build_mask(net, p, d_r, d_f, 0.5, 0.1);
  EXPECT_EQ(m.bits, combine(m.filter.bits, m.reserve.bits));
  EXPECT_EQ(m.reserve.count, 3u);
  EXPECT_EQ(m.filter.count, 1u);
  EXPECT_EQ(m.digest(), build_mask(net, p, d_r, d_f, 0.5, 0.1).digest());
  EXPECT_NE(m.digest(), build_mask(net, p, d_r, d_f, 1.0, 0.1).digest());

  const auto j = nlohmann::json::parse(m.to_json());
  EXPECT_EQ(j["k"], 0.5);
  EXPECT_EQ(j["k_r"], 0.1);
  ASSERT_EQ(j["tensors"].size(), 6u);
  EXPECT_EQ(j["tensors"][0]["tensor_name"], "fc1.weight");
  EXPECT_EQ(j["tensors"][0]["score_r"], m.scores_r.values[0]);

  const auto full = full_mask(p);
  EXPECT_EQ(full.bits.count(), 6u);
}

}  // namespace
}  // namespace mcu
