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

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace metriq::stats {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  void merge(const CompensatedSum& other);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// n, sum of v and sum of v^2 over per-unit values v.
struct MomentAccumulator {
  double n = 0;
  double sum_v = 0;
  double sum_v2 = 0;

  static MomentAccumulator from_values(const std::vector<double>& values);
  MomentAccumulator& merge(const MomentAccumulator& other);
};

/// Per-unit numerator y and denominator x moments for ratio metrics.
struct RatioMoments {
  double n = 0;
  double sum_y = 0;
  double sum_x = 0;
  double sum_y2 = 0;
  double sum_x2 = 0;
  double sum_xy = 0;

  static RatioMoments from_pairs(const std::vector<double>& y, const std::vector<double>& x);
  RatioMoments& merge(const RatioMoments& other);
};

/// A point estimate and the variance of that estimate.
struct Estimate {
  double value = 0;
  double variance = 0;
};

/// Mean of the unit values and s^2/n. Throws InsufficientSample when n < 2.
Estimate mean_and_variance(const MomentAccumulator& m);

/// Sum(y)/Sum(x) with its first-order Taylor (delta method) variance using
/// n-1 sample moments. Throws UndefinedRatio when mean x is 0 and
/// InsufficientSample when n < 2.
Estimate delta_ratio_variance(const RatioMoments& r);

struct Sample {
  double value = 0;
  double variance = 0;  // of the value
  double n = 0;
};

struct TestResult {
  double value_t = 0;
  double value_c = 0;
  double delta = 0;
  std::optional<double> relative_delta;  // empty when value_c is 0
  double stderr_ = 0;
  double z = 0;
  double p_value = 1;
  double ci_low = 0;
  double ci_high = 0;
  double n_t = 0;
  double n_c = 0;
};

inline constexpr double kZ975 = 1.959964;

/// Two-sided z-test of value_t - value_c. With zero total variance a delta
/// within rounding noise of the means gives z = 0 and p = 1; a larger one
/// throws DegenerateVariance. relative_delta is left empty when value_c is
/// at rounding-noise level next to |delta| + stderr.
TestResult two_sample_test(const Sample& t, const Sample& c);

/// Standard normal CDF.
double normal_cdf(double z);

/// 1-based nearest-rank index: the smallest k with 100*k >= rank*n.
std::size_t nearest_rank_index(std::size_t n, double rank);

/// `sorted` must be ascending. Throws InsufficientSample when empty.
double percentile_nearest_rank(const std::vector<double>& sorted, double rank);

}  // namespace metriq::stats
