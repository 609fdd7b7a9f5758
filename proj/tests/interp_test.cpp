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
#include <vector>

#include "mculab/errors.hpp"
#include "mculab/interp.hpp"
#include "mculab/rng.hpp"

namespace mcu {
namespace {

TEST(Quadratic, InterpolatesItsSamples) {
  const auto q = fit_quadratic({0.75, 0.875, 1.0}, {0.3, 0.1, 0.2});
  EXPECT_NEAR(q(0.75), 0.3, 1e-15);
  EXPECT_NEAR(q(0.875), 0.1, 1e-15);
  EXPECT_NEAR(q(1.0), 0.2, 1e-15);
  EXPECT_TRUE(q.convex());
  // Hand solution: a = 9.6; vertex = 0.8125 - d01 / (2a) with d01 = -1.6.
  EXPECT_NEAR(q.a, 9.6, 1e-12);
  EXPECT_NEAR(q.vertex(), 0.8125 + 1.6 / 19.2, 1e-12);
}

TEST(Quadratic, RejectsRepeatedOrNonFiniteKnots) {
  EXPECT_THROW(fit_quadratic({0.5, 0.5, 1.0}, {1, 2, 3}), InvalidInputError);
  EXPECT_THROW(fit_quadratic({0.0, 0.5, 1.0}, {1, NAN, 3}), InvalidInputError);
}

TEST(ArgminOnInterval, ClampsAndHandlesConcaveAndLinear) {
  EXPECT_EQ(argmin_on_interval(fit_quadratic({0.75, 0.875, 1.0}, {0.3, 0.2, 0.1}), 0.75, 1.0),
            1.0);
  EXPECT_EQ(argmin_on_interval(fit_quadratic({0.75, 0.875, 1.0}, {0.2, 0.1, 0.2}), 0.75, 1.0),
            0.875);
  EXPECT_EQ(argmin_on_interval(fit_quadratic({0.75, 0.875, 1.0}, {0.1, 0.3, 0.2}), 0.75, 1.0),
            0.75);
  // Vertex far outside the interval.
  EXPECT_EQ(argmin_on_interval(fit_quadratic({0.75, 0.875, 1.0}, {0.5, 0.3, 0.2}), 0.75, 1.0),
            1.0);
}

TEST(NaturalCubicSpline, ThreeKnotHandSolution) {
  // Knots (0,0), (1,1), (2,0): m1 = -3, so on [0,1] s = 1.5x - 0.5x^3.
  const NaturalCubicSpline s({0, 1, 2}, {0, 1, 0});
  EXPECT_NEAR(s(0.5), 0.6875, 1e-15);
  EXPECT_NEAR(s(1.5), 0.6875, 1e-15);
  const auto c = s.coefficients(0);
  EXPECT_NEAR(c[0], 1.5, 1e-15);
  EXPECT_EQ(c[1], 0.0);
  EXPECT_NEAR(c[2], -0.5, 1e-15);
}

TEST(NaturalCubicSpline, ExactAtKnotsAndReproducesLines) {
  std::vector<double> xs, ys, lin;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(i / 19.0);
    ys.push_back(std::sin(7.0 * i));
    lin.push_back(0.25 - 2.0 * xs.back());
  }
  const NaturalCubicSpline s(xs, ys);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(s(xs[i]), ys[i]);
  const NaturalCubicSpline line(xs, lin);
  for (double x = 0.0; x <= 1.0; x += 0.0137) EXPECT_NEAR(line(x), 0.25 - 2.0 * x, 1e-13);
}

// Value, slope and curvature agree across every interior knot; curvature
// vanishes at both ends.
TEST(NaturalCubicSpline, TwiceContinuousAndNatural) {
  Rng rng(5);
  std::vector<double> xs = {0.0}, ys;
  for (int i = 1; i < 12; ++i) xs.push_back(xs.back() + 0.05 + rng.uniform());
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(rng.normal());
  const NaturalCubicSpline s(xs, ys);
  for (std::size_t i = 0; i + 1 < s.segments(); ++i) {
    const double h = xs[i + 1] - xs[i];
    const auto [b, c, d] = s.coefficients(i);
    const auto [b1, c1, d1] = s.coefficients(i + 1);
    EXPECT_NEAR(ys[i] + h * (b + h * (c + h * d)), ys[i + 1], 1e-12);
    EXPECT_NEAR(b + 2 * c * h + 3 * d * h * h, b1, 1e-11);
    EXPECT_NEAR(2 * c + 6 * d * h, 2 * c1, 1e-10);
  }
  EXPECT_EQ(s.coefficients(0)[1], 0.0);
  const std::size_t last = s.segments() - 1;
  const auto [b, c, d] = s.coefficients(last);
  EXPECT_NEAR(2 * c + 6 * d * (xs[last + 1] - xs[last]), 0.0, 1e-10);
}

TEST(NaturalCubicSpline, Throws) {
  EXPECT_THROW(NaturalCubicSpline({0.0}, {1.0}), InvalidInputError);
  EXPECT_THROW(NaturalCubicSpline({0.0, 0.0}, {1.0, 2.0}), InvalidInputError);
  EXPECT_THROW(NaturalCubicSpline({0.0, 1.0}, {1.0}), InvalidInputError);
  const NaturalCubicSpline s({0.0, 1.0}, {1.0, 2.0});
  EXPECT_THROW(s(1.5), InvalidInputError);
  EXPECT_THROW(s(-0.1), InvalidInputError);
}

TEST(SublevelIntervals, ConstantIsEmpty) {
  const NaturalCubicSpline s({0.0, 0.5, 1.0}, {0.2, 0.2, 0.2});
  EXPECT_TRUE(sublevel_intervals(s, 0.2).empty());
}

TEST(SublevelIntervals, BelowEndpointEverywhereIsOneOpenInterval) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(i == 19 ? 1.0 : i / 19.0);
    ys.push_back(0.5 - 0.4 * std::sin(M_PI * xs.back()));
  }
  ys.front() = 0.5;
  ys.back() = 0.5;
  const auto iv = sublevel_intervals(NaturalCubicSpline(xs, ys), 0.5);
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_EQ(iv[0].lo, 0.0);
  EXPECT_EQ(iv[0].hi, 1.0);
  EXPECT_FALSE(iv[0].lo_closed);
  EXPECT_FALSE(iv[0].hi_closed);
  EXPECT_FALSE(iv[0].contains(1.0));
  EXPECT_TRUE(iv[0].contains(0.5));
}

TEST(SublevelIntervals, ClosedAtAnEndBelowLevel) {
  const auto iv = sublevel_intervals(NaturalCubicSpline({0.0, 1.0}, {0.0, 1.0}), 0.5);
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_TRUE(iv[0].lo_closed);
  EXPECT_EQ(iv[0].lo, 0.0);
  EXPECT_NEAR(iv[0].hi, 0.5, 1e-14);
  EXPECT_FALSE(iv[0].hi_closed);
}

// Dense sampling oracle: membership equals s(t) < level away from the
// boundaries, and the intervals are disjoint and ordered.
TEST(SublevelIntervals, MatchesDenseSampling) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> xs, ys;
    const int n = 3 + static_cast<int>(rng.below(18));
    for (int i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(i) / (n - 1));
      ys.push_back(rng.uniform());
    }
    const NaturalCubicSpline s(xs, ys);
    const double level = rng.uniform();
    const auto iv = sublevel_intervals(s, level);
    for (std::size_t k = 1; k < iv.size(); ++k) ASSERT_LT(iv[k - 1].hi, iv[k].lo);
    for (int j = 0; j <= 5000; ++j) {
      const double t = j / 5000.0;
      const double f = s(t) - level;
      if (std::abs(f) < 1e-9) continue;
      bool in = false;
      for (const auto& i : iv) in = in || i.contains(t);
      ASSERT_EQ(in, f < 0.0) << "trial " << trial << " t " << t;
    }
  }
}

}  // namespace
}  // namespace mcu
