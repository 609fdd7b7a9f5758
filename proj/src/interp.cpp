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

#include "mculab/interp.hpp"

#include <algorithm>
#include <cmath>

#include "mculab/errors.hpp"

namespace mcu {

namespace {

void require_knots(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidInputError("knot/value count mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw InvalidInputError("interpolation input is not finite");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw InvalidInputError("interpolation knots must be strictly increasing");
    }
  }
}

}  // namespace

double Quadratic::operator()(double t) const {
  return y[0] + d01 * (t - x[0]) + a * (t - x[0]) * (t - x[1]);
}

double Quadratic::vertex() const { return (x[0] + x[1]) / 2.0 - d01 / (2.0 * a); }

Quadratic fit_quadratic(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  require_knots({x.begin(), x.end()}, {y.begin(), y.end()});
  Quadratic q;
  q.x = x;
  q.y = y;
  q.d01 = (y[1] - y[0]) / (x[1] - x[0]);
  const double d12 = (y[2] - y[1]) / (x[2] - x[1]);
  q.a = (d12 - q.d01) / (x[2] - x[0]);
  return q;
}

double argmin_on_interval(const Quadratic& q, double lo, double hi) {
  if (q.convex()) return std::clamp(q.vertex(), lo, hi);
  return q(lo) < q(hi) ? lo : hi;
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  require_knots(xs_, ys_);
  if (xs_.size() < 2) throw InvalidInputError("spline needs at least two knots");
  const std::size_t n = xs_.size() - 1;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = xs_[i + 1] - xs_[i];

  // Second derivatives m with m[0] = m[n] = 0 via the Thomas algorithm.
  std::vector<double> m(n + 1, 0.0);
  if (n > 1) {
    std::vector<double> diag(n - 1), upper(n - 1), rhs(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
      upper[i - 1] = h[i];
      rhs[i - 1] = 6.0 * ((ys_[i + 1] - ys_[i]) / h[i] - (ys_[i] - ys_[i - 1]) / h[i - 1]);
    }
    for (std::size_t i = 1; i < n - 1; ++i) {
      const double w = h[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[n - 1] = rhs[n - 2] / diag[n - 2];
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
    }
  }

  b_.resize(n);
  c_.resize(n);
  d_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b_[i] = (ys_[i + 1] - ys_[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
}

double NaturalCubicSpline::eval(std::size_t i, double dx) const {
  return ys_[i] + dx * (b_[i] + dx * (c_[i] + dx * d_[i]));
}

double NaturalCubicSpline::operator()(double x) const {
  if (!(x >= xs_.front() && x <= xs_.back())) {
    throw InvalidInputError("spline evaluated outside its knots");
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  if (xs_[k] == x) return ys_[k];
  return eval(k, x - xs_[k]);
}

std::vector<Interval> sublevel_intervals(const NaturalCubicSpline& s, double level) {
  const auto& xs = s.knots();
  auto f = [&](double x) { return s(x) - level; };

  // Breakpoints: knots, stationary points, and roots of f between them.
  std::vector<double> cuts(xs.begin(), xs.end());
  for (std::size_t i = 0; i < s.segments(); ++i) {
    const double h = xs[i + 1] - xs[i];
    std::vector<double> piece = {xs[i]};
    // Stationary points: b + 2c dx + 3d dx^2 = 0.
    const auto [b, c, d] = s.coefficients(i);
    const double two_c = 2.0 * c;
    const double three_d = 3.0 * d;
    std::vector<double> roots;
    if (three_d != 0.0) {
      const double disc = two_c * two_c - 4.0 * three_d * b;
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        roots.push_back((-two_c - r) / (2.0 * three_d));
        roots.push_back((-two_c + r) / (2.0 * three_d));
      }
    } else if (two_c != 0.0) {
      roots.push_back(-b / two_c);
    }
    std::sort(roots.begin(), roots.end());
    for (double r : roots) {
      if (r > 0.0 && r < h) piece.push_back(xs[i] + r);
    }
    piece.push_back(xs[i + 1]);

    for (std::size_t j = 0; j + 1 < piece.size(); ++j) {
      double lo = piece[j];
      double hi = piece[j + 1];
      double flo = f(lo);
      const double fhi = f(hi);
      if (j + 1 < piece.size() - 1) cuts.push_back(hi);
      if (!((flo < 0.0 && fhi > 0.0) || (flo > 0.0 && fhi < 0.0))) continue;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = lo + (hi - lo) / 2.0;
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(lo + (hi - lo) / 2.0);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Interval> out;
  const double x_first = xs.front();
  const double x_last = xs.back();
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double lo = cuts[j];
    const double hi = cuts[j + 1];
    if (!(f(lo + (hi - lo) / 2.0) < 0.0)) continue;
    if (!out.empty() && out.back().hi == lo && f(lo) < 0.0) {
      out.back().hi = hi;
    } else {
      out.push_back({lo, hi, lo == x_first && f(lo) < 0.0, false});
    }
    out.back().hi_closed = hi == x_last && f(hi) < 0.0;
  }
  return out;
}

}  // namespace mcu
