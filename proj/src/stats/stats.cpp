// Copyright 2026 The Metriq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metriq/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metriq/error.hpp"
#include "metriq/value.hpp"

namespace metriq::stats {

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) {
  add(other.sum_);
  compensation_ += other.compensation_;
}

MomentAccumulator MomentAccumulator::from_values(const std::vector<double>& values) {
  CompensatedSum s, s2;
  for (double v : values) {
    s.add(v);
    s2.add(v * v);
  }
  return {static_cast<double>(values.size()), s.value(), s2.value()};
}

MomentAccumulator& MomentAccumulator::merge(const MomentAccumulator& other) {
  n += other.n;
  sum_v += other.sum_v;
  sum_v2 += other.sum_v2;
  return *this;
}

RatioMoments RatioMoments::from_pairs(const std::vector<double>& y, const std::vector<double>& x) {
  if (y.size() != x.size()) throw Error(ErrorCode::Internal, "ratio moments: y and x differ in length");
  CompensatedSum sy, sx, sy2, sx2, sxy;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sy.add(y[i]);
    sx.add(x[i]);
    sy2.add(y[i] * y[i]);
    sx2.add(x[i] * x[i]);
    sxy.add(x[i] * y[i]);
  }
  return {static_cast<double>(y.size()), sy.value(), sx.value(), sy2.value(), sx2.value(), sxy.value()};
}

RatioMoments& RatioMoments::merge(const RatioMoments& other) {
  n += other.n;
  sum_y += other.sum_y;
  sum_x += other.sum_x;
  sum_y2 += other.sum_y2;
  sum_x2 += other.sum_x2;
  sum_xy += other.sum_xy;
  return *this;
}

namespace {

// Relative level below which moment differences are rounding noise: well
// above accumulated summation error for 1e5 terms, far below any real
// coefficient of variation.
constexpr double kNoise = 1e-11;

void require_sample(double n) {
  if (!(n >= 2))
    throw Error(ErrorCode::InsufficientSample, "at least 2 units are required, found " + format_number(n));
}

}  // namespace

Estimate mean_and_variance(const MomentAccumulator& m) {
  require_sample(m.n);
  double mean = m.sum_v / m.n;
  double centered = m.sum_v2 - m.sum_v * m.sum_v / m.n;
  // below the rounding noise of the two sums the spread is zero
  if (centered <= kNoise * m.sum_v2) centered = 0;
  return {mean, centered / (m.n - 1) / m.n};
}

Estimate delta_ratio_variance(const RatioMoments& r) {
  require_sample(r.n);
  double n = r.n;
  double mu_x = r.sum_x / n;
  if (mu_x == 0) throw Error(ErrorCode::UndefinedRatio, "ratio denominator has mean 0");
  // The Taylor bracket var_y/mx^2 - 2 mu_y cov/mx^3 + mu_y^2 var_x/mx^4
  // equals sum((y - R x)^2) / ((n-1) mx^2) with R = sum_y/sum_x; the
  // residual form cancels cleanly when y is proportional to x.
  double ratio = r.sum_y / r.sum_x;
  double resid = r.sum_y2 - 2 * ratio * r.sum_xy + ratio * ratio * r.sum_x2;
  double scale = r.sum_y2 + 2 * std::fabs(ratio * r.sum_xy) + ratio * ratio * r.sum_x2;
  if (resid <= kNoise * scale) resid = 0;
  double bracket = resid / (n - 1) / (mu_x * mu_x);
  return {r.sum_y / r.sum_x, bracket / n};
}

TestResult two_sample_test(const Sample& t, const Sample& c) {
  require_sample(t.n);
  require_sample(c.n);
  if (t.variance < 0 || c.variance < 0) throw Error(ErrorCode::Internal, "negative variance passed to z-test");
  TestResult r;
  r.value_t = t.value;
  r.value_c = c.value;
  r.n_t = t.n;
  r.n_c = c.n;
  r.delta = t.value - c.value;
  double var = t.variance + c.variance;
  r.stderr_ = std::sqrt(var);
  // a control value at noise level next to the delta has no usable ratio
  if (std::fabs(c.value) > kNoise * (std::fabs(r.delta) + r.stderr_)) r.relative_delta = r.delta / c.value;
  if (var == 0) {
    // a difference at rounding level of the means counts as none
    if (std::fabs(r.delta) > kNoise * std::max(std::fabs(t.value), std::fabs(c.value)))
      throw Error(ErrorCode::DegenerateVariance,
                  "both variants have zero variance but differ by " + format_number(r.delta));
    r.z = 0;
    r.p_value = 1;
  } else {
    r.z = r.delta / r.stderr_;
    r.p_value = std::clamp(std::erfc(std::fabs(r.z) / std::sqrt(2.0)), 0.0, 1.0);
  }
  r.ci_low = r.delta - kZ975 * r.stderr_;
  r.ci_high = r.delta + kZ975 * r.stderr_;
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::size_t nearest_rank_index(std::size_t n, double rank) {
  double target = rank * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(target / 100.0));
  while (k > 1 && 100.0 * static_cast<double>(k - 1) >= target) --k;
  while (100.0 * static_cast<double>(k) < target) ++k;
  return std::clamp<std::size_t>(k, 1, n);
}

double percentile_nearest_rank(const std::vector<double>& sorted, double rank) {
  if (sorted.empty()) throw Error(ErrorCode::InsufficientSample, "percentile of an empty list");
  return sorted[nearest_rank_index(sorted.size(), rank) - 1];
}

}  // namespace metriq::stats
