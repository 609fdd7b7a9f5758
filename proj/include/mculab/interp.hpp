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

#ifndef MCULAB_INTERP_HPP_
#define MCULAB_INTERP_HPP_

#include <array>
#include <cstddef>
#include <vector>

namespace mcu {

/// p(x) = y0 + d01 (x - x0) + a (x - x0)(x - x1), the Newton form through
/// three points.
struct Quadratic {
  std::array<double, 3> x{};
  std::array<double, 3> y{};
  double d01 = 0.0;  // first divided difference
  double a = 0.0;    // leading coefficient

  double operator()(double t) const;
  bool convex() const { return a > 0.0; }
  /// Stationary point; only meaningful when a != 0.
  double vertex() const;
};

/// Throws InvalidInputError unless x is strictly increasing and all values
/// are finite.
Quadratic fit_quadratic(const std::array<double, 3>& x, const std::array<double, 3>& y);

/// Minimiser of the fitted quadratic over [lo, hi]. Concave or flat fits
/// fall back to the endpoint with the lower value, preferring hi on a tie.
double argmin_on_interval(const Quadratic& q, double lo, double hi);

/// Natural cubic spline through (xs[i], ys[i]).
class NaturalCubicSpline {
 public:
  /// Needs at least two strictly increasing, finite knots.
  NaturalCubicSpline(std::vector<double> xs, std::vector<double> ys);

  /// Exact at the knots; outside [xs.front(), xs.back()] throws.
  double operator()(double x) const;
  /// (b, c, d) of segment i: s(x) = y_i + b dx + c dx^2 + d dx^3.
  std::array<double, 3> coefficients(std::size_t i) const { return {b_[i], c_[i], d_[i]}; }

  std::size_t segments() const { return xs_.size() - 1; }
  const std::vector<double>& knots() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }

 private:
  double eval(std::size_t i, double dx) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> b_, c_, d_;  // per-segment coefficients
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double t) const {
    return (t > lo || (lo_closed && t == lo)) && (t < hi || (hi_closed && t == hi));
  }
  bool operator==(const Interval&) const = default;
};

/// Maximal intervals of {x : s(x) < level} on the spline's domain. Segments
/// are split at their stationary points and roots refined by bisection, so
/// every sign change is found.
std::vector<Interval> sublevel_intervals(const NaturalCubicSpline& s, double level);

}  // namespace mcu

#endif  // MCULAB_INTERP_HPP_
