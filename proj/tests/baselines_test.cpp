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

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "mculab/baselines.hpp"
#include "mculab/data.hpp"
#include "mculab/errors.hpp"
#include "mculab/eval.hpp"
#include "test_util.hpp"

namespace mcu {
namespace {

// Small blobs task shared by every test in this file.
struct World {
  Mlp net{{{2, 32, 32, 4}, Activation::kRelu}};
  DataSplits s;
  ParamSet theta_o;
  ParamSet theta_rt;
  TrainConfig train{60, 32, 0.1, 3};

  World() {
    const auto train_set = make_dataset({GeneratorKind::kBlobs, 800, 1.0, 4, 2, 3.0}, 1);
    const auto pool = make_dataset({GeneratorKind::kBlobs, 1000, 1.0, 4, 2, 3.0}, 2);
    auto f = split_random_forgetting(train_set, 0.1, 3);
    auto v = split_validation(pool, 0.1, 4);
    s = {train_set, f.first, f.second, v.first, v.second, std::nullopt, std::nullopt};
    theta_o = train_from_scratch(net, train_set, train, 5);
    theta_rt = retrain(net, s.d_r, train, 6);
  }

  UnlearnConfig unlearn(double lr = 0.05, std::size_t epochs = 5) const {
    UnlearnConfig c;
    c.lr = lr;
    c.epochs = epochs;
    c.seed = 9;
    return c;
  }

  double avg_gap(const ParamSet& p) const {
    const MetricsReport rt = metrics(net, theta_rt, s, "RT");
    return gaps(metrics(net, p, s), &rt).avg_gap;
  }
};

class Baselines : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { world_ = std::make_unique<World>(); }
  static void TearDownTestSuite() { world_.reset(); }
  static const World& w() { return *world_; }

 private:
  static std::unique_ptr<World> world_;
};

std::unique_ptr<World> Baselines::world_;

double forget_acc(const World& w, const ParamSet& p) { return w.net.accuracy(p, w.s.d_f); }

TEST_F(Baselines, ZeroEpochsOrLearningRateAreIdentity) {
  const auto& o = w().theta_o;
  for (auto cfg : {w().unlearn(0.0, 5), w().unlearn(0.05, 0)}) {
    EXPECT_TRUE(finetune(w().net, o, w().s.d_r, cfg).bit_identical(o));
    EXPECT_TRUE(gradient_ascent(w().net, o, w().s.d_f, cfg).bit_identical(o));
    EXPECT_TRUE(neggrad_plus(w().net, o, w().s.d_f, w().s.d_r, cfg).bit_identical(o));
  }
}

TEST_F(Baselines, RetrainIsDeterministicAndCloseToOriginal) {
  const ParamSet again = retrain(w().net, w().s.d_r, w().train, 6);
  EXPECT_TRUE(again.bit_identical(w().theta_rt));
  const double a_o = w().net.accuracy(w().theta_o, w().s.d_t);
  const double a_rt = w().net.accuracy(w().theta_rt, w().s.d_t);
  EXPECT_LE(std::abs(a_o - a_rt), 0.02);
}

TEST_F(Baselines, FinetuneDoesNotLowerRetainAccuracy) {
  const ParamSet ft = finetune(w().net, w().theta_o, w().s.d_r, w().unlearn(0.01));
  EXPECT_GE(w().net.accuracy(ft, w().s.d_r) + 1e-12, w().net.accuracy(w().theta_o, w().s.d_r));
}

TEST_F(Baselines, RelabelDrawsWrongClassesUniformly) {
  LabeledDataset d;
  const std::size_t n = 3000;
  d.features = Matrix(n, 2);
  d.labels.assign(n, 1);
  d.class_count = 4;
  const auto r = relabel_forget(d, 17);
  std::vector<double> counts(4, 0.0);
  for (int y : r.labels) counts[static_cast<std::size_t>(y)] += 1;
  EXPECT_EQ(counts[1], 0.0);
  // Chi-square over the three wrong classes; 9.21 is the p = 0.01 cut at
  // two degrees of freedom.
  double chi2 = 0;
  for (std::size_t c : {0u, 2u, 3u}) chi2 += std::pow(counts[c] - n / 3.0, 2) / (n / 3.0);
  EXPECT_LT(chi2, 9.21);

  const auto real = relabel_forget(w().s.d_f, 3);
  for (std::size_t i = 0; i < real.size(); ++i) EXPECT_NE(real.labels[i], w().s.d_f.labels[i]);
  LabeledDataset one = d;
  one.class_count = 1;
  one.labels.assign(n, 0);
  EXPECT_THROW(relabel_forget(one, 1), InvalidInputError);
}

TEST_F(Baselines, GradientAscentStepIsNegatedSgd) {
  UnlearnConfig cfg = w().unlearn(0.01, 1);
  cfg.batch_size = w().s.d_f.size();  // one batch, so one step
  const ParamSet ga = gradient_ascent(w().net, w().theta_o, w().s.d_f, cfg);
  // A single full batch is a permutation of D_f; the mean loss gradient
  // doesn't depend on row order up to rounding.
  const auto g = w().net.backward(w().theta_o, w().s.d_f.features, w().s.d_f.labels).grads;
  const ParamSet want = sgd_step(w().theta_o, g, -0.01);
  for (std::size_t k = 0; k < want.size(); ++k) {
    for (std::size_t i = 0; i < want[k].size(); ++i) {
      ASSERT_NEAR(ga[k].values[i], want[k].values[i], 1e-14);
    }
  }
}

TEST_F(Baselines, GradientAscentRaisesUnlearningAccuracy) {
  const ParamSet ga = gradient_ascent(w().net, w().theta_o, w().s.d_f, w().unlearn(0.01, 5));
  EXPECT_LT(forget_acc(w(), ga), forget_acc(w(), w().theta_o));
}

TEST_F(Baselines, GradientAscentDivergenceIsNumericError) {
  EXPECT_THROW(gradient_ascent(w().net, w().theta_o, w().s.d_f, w().unlearn(50.0, 200)),
               NumericError);
}

TEST_F(Baselines, NegGradWithoutForgetTermIsFinetune) {
  UnlearnConfig cfg = w().unlearn(0.05, 3);
  cfg.neggrad_beta = 0.0;
  EXPECT_TRUE(neggrad_plus(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg)
                  .bit_identical(finetune(w().net, w().theta_o, w().s.d_r, cfg)));
}

TEST_F(Baselines, NegGradBeatsGradientAscentOnGap) {
  UnlearnConfig cfg = w().unlearn(0.05, 5);
  cfg.neggrad_beta = 0.5;
  const ParamSet ng = neggrad_plus(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg);
  const ParamSet ga = gradient_ascent(w().net, w().theta_o, w().s.d_f, w().unlearn(0.05, 5));
  EXPECT_LT(w().avg_gap(ng), w().avg_gap(ga));
}

TEST_F(Baselines, NegatedTaskVectorIdentity) {
  const TaskVectorResult tv = negtv(w().net, w().theta_o, w().s.d_f, w().unlearn(0.05));
  for (std::size_t k = 0; k < tv.tau.size(); ++k) {
    for (std::size_t i = 0; i < tv.tau[k].size(); ++i) {
      ASSERT_EQ(tv.tau[k].values[i], tv.theta_ft[k].values[i] - w().theta_o[k].values[i]);
    }
  }
  for (double alpha : {0.0, 0.2, 0.9, 1.0}) {
    const ParamSet u = negate_task_vector(w().theta_o, tv.tau, alpha);
    for (std::size_t k = 0; k < u.size(); ++k) {
      for (std::size_t i = 0; i < u[k].size(); ++i) {
        const double want = w().theta_o[k].values[i] - alpha * tv.tau[k].values[i];
        ASSERT_LE(std::abs(u[k].values[i] - want),
                  std::nextafter(std::abs(want), INFINITY) - std::abs(want));
      }
    }
  }
  EXPECT_TRUE(negate_task_vector(w().theta_o, tv.tau, 0.0).bit_identical(w().theta_o));
  EXPECT_THROW(negate_task_vector(w().theta_o, tv.tau, -0.1), InvalidInputError);
}

TEST_F(Baselines, EntanglementExistsOnBlobs) {
  const TaskVectorResult tv = negtv(w().net, w().theta_o, w().s.d_f, w().unlearn(0.05));
  const auto rep = entanglement_probe(w().net, w().theta_o, tv.tau, 0.9, w().s.d_r);
  EXPECT_GT(rep.flip_rate, 0.0);
  EXPECT_GT(rep.max_logit_l2, rep.mean_logit_l2);
  const auto none = entanglement_probe(w().net, w().theta_o, tv.tau, 0.0, w().s.d_r);
  EXPECT_EQ(none.flip_rate, 0.0);
  EXPECT_EQ(none.max_logit_l2, 0.0);
}

TEST_F(Baselines, SaliencyMaskKeepsLargestGradients) {
  const double fraction = 0.3;
  const ElementMask m = saliency_mask(w().net, w().theta_o, w().s.d_f, fraction);
  const auto g = w().net.backward(w().theta_o, w().s.d_f.features, w().s.d_f.labels).grads;
  std::vector<double> flat, kept;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (std::size_t i = 0; i < g[k].size(); ++i) {
      flat.push_back(std::abs(g[k].values[i]));
      if (m.bits[k][i]) kept.push_back(flat.back());
    }
  }
  const auto want = static_cast<std::size_t>(std::ceil(fraction * flat.size()));
  EXPECT_EQ(m.count(), want);
  std::sort(flat.begin(), flat.end(), std::greater<>());
  const double cut = flat[want - 1];
  for (double v : kept) EXPECT_GE(v, cut);
  EXPECT_THROW(saliency_mask(w().net, w().theta_o, w().s.d_f, 0.0), InvalidInputError);
}

TEST_F(Baselines, SalunFullFractionIsRandomLabel) {
  UnlearnConfig cfg = w().unlearn(0.05, 2);
  cfg.saliency_fraction = 1.0;
  EXPECT_TRUE(salun_lite(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg)
                  .bit_identical(random_label(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg)));
}

TEST_F(Baselines, SalunLeavesNonSalientElementsAlone) {
  UnlearnConfig cfg = w().unlearn(0.05, 2);
  cfg.saliency_fraction = 0.2;
  const ParamSet u = salun_lite(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg);
  const ElementMask m = saliency_mask(w().net, w().theta_o, w().s.d_f, 0.2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    for (std::size_t i = 0; i < u[k].size(); ++i) {
      if (!m.bits[k][i]) ASSERT_EQ(u[k].values[i], w().theta_o[k].values[i]);
    }
  }
}

TEST_F(Baselines, SalunForgetsBetweenFinetuneAndRandomLabel) {
  UnlearnConfig cfg = w().unlearn(0.05, 5);
  cfg.saliency_fraction = 0.5;
  const double ua_ft = 1 - forget_acc(w(), finetune(w().net, w().theta_o, w().s.d_r, cfg));
  const double ua_rl =
      1 - forget_acc(w(), random_label(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg));
  const double ua_sa =
      1 - forget_acc(w(), salun_lite(w().net, w().theta_o, w().s.d_f, w().s.d_r, cfg));
  // Which of FT and RL forgets more depends on how much D_f was memorised;
  // SalUn-lite sits between them either way.
  EXPECT_GE(ua_sa, std::min(ua_ft, ua_rl));
  EXPECT_LE(ua_sa, std::max(ua_ft, ua_rl));
}

TEST(MethodNames, RoundTrip) {
  for (Method m : {Method::kRetrain, Method::kFinetune, Method::kRandomLabel,
                   Method::kGradientAscent, Method::kNegGradPlus, Method::kNegTaskVector,
                   Method::kSalunLite}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_EQ(display_name(Method::kNegGradPlus), "NegGrad+");
  EXPECT_THROW(parse_method("scrub"), ConfigError);
}

TEST(UnlearnConfig, Validates) {
  UnlearnConfig c;
  c.alpha = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.saliency_fraction = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace mcu
