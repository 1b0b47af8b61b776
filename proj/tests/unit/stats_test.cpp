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

#include <gtest/gtest.h>

#include <cmath>

#include "metriq/error.hpp"
#include "metriq/stats/stats.hpp"
#include "metriq/synth/synth.hpp"

namespace metriq::stats {
namespace {

// Expected values below were computed independently with 40-digit
// arithmetic from the definition formulas.

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Internal;
}

std::vector<double> quarters(synth::Rng& rng, std::size_t n, int hi = 40) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.below(hi * 4 + 1)) / 4.0;
  return v;
}

TEST(MeanAndVariance, HandEvaluated) {
  Estimate e = mean_and_variance({3, 6, 14});
  EXPECT_DOUBLE_EQ(e.value, 2.0);
  EXPECT_DOUBLE_EQ(e.variance, 1.0 / 3.0);
}

TEST(MeanAndVariance, ConstantValues) {
  Estimate e = mean_and_variance(MomentAccumulator::from_values({7, 7, 7, 7, 7}));
  EXPECT_EQ(e.value, 7.0);
  EXPECT_EQ(e.variance, 0.0);
}

TEST(MeanAndVariance, NeedsTwoUnits) {
  EXPECT_EQ(code_of([] { mean_and_variance({1, 5, 25}); }), ErrorCode::InsufficientSample);
  EXPECT_EQ(code_of([] { mean_and_variance({}); }), ErrorCode::InsufficientSample);
}

TEST(DeltaRatio, FrozenExample) {
  Estimate e = delta_ratio_variance(RatioMoments::from_pairs({3, 5, 2, 8, 1}, {1, 2, 1, 3, 1}));
  EXPECT_DOUBLE_EQ(e.value, 2.375);
  EXPECT_NEAR(e.variance, 0.0634765625, 1e-15);
}

TEST(DeltaRatio, PerfectlyProportionalHasZeroVariance) {
  std::vector<double> x = {1, 4, 2, 7, 3, 3};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v);
  Estimate e = delta_ratio_variance(RatioMoments::from_pairs(y, x));
  EXPECT_EQ(e.value, 2.0);
  EXPECT_EQ(e.variance, 0.0);
}

TEST(DeltaRatio, UnitDenominatorMatchesStandard) {
  synth::Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    auto y = quarters(rng, 2 + rng.below(40));
    std::vector<double> ones(y.size(), 1.0);
    Estimate d = delta_ratio_variance(RatioMoments::from_pairs(y, ones));
    Estimate s = mean_and_variance(MomentAccumulator::from_values(y));
    EXPECT_NEAR(d.value, s.value, 1e-12 * std::abs(s.value));
    EXPECT_NEAR(d.variance, s.variance, 1e-12 * std::abs(s.variance) + 1e-300);
  }
}

TEST(DeltaRatio, Errors) {
  EXPECT_EQ(code_of([] { delta_ratio_variance(RatioMoments::from_pairs({1, 2}, {0, 0})); }), ErrorCode::UndefinedRatio);
  EXPECT_EQ(code_of([] { delta_ratio_variance(RatioMoments::from_pairs({1}, {1})); }),
            ErrorCode::InsufficientSample);
}

TEST(Accumulators, MergeEqualsSinglePass) {
  synth::Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    auto v = quarters(rng, 1 + rng.below(60));
    auto w = quarters(rng, 1 + rng.below(60));
    std::size_t cut = rng.below(v.size() + 1);
    MomentAccumulator a = MomentAccumulator::from_values({v.begin(), v.begin() + cut});
    a.merge(MomentAccumulator::from_values({v.begin() + cut, v.end()}));
    MomentAccumulator whole = MomentAccumulator::from_values(v);
    EXPECT_EQ(a.n, whole.n);
    EXPECT_EQ(a.sum_v, whole.sum_v);
    EXPECT_EQ(a.sum_v2, whole.sum_v2);

    auto x = quarters(rng, v.size(), 5);
    RatioMoments r = RatioMoments::from_pairs({v.begin(), v.begin() + cut}, {x.begin(), x.begin() + cut});
    r.merge(RatioMoments::from_pairs({v.begin() + cut, v.end()}, {x.begin() + cut, x.end()}));
    RatioMoments rw = RatioMoments::from_pairs(v, x);
    EXPECT_EQ(r.n, rw.n);
    EXPECT_EQ(r.sum_y, rw.sum_y);
    EXPECT_EQ(r.sum_x, rw.sum_x);
    EXPECT_EQ(r.sum_y2, rw.sum_y2);
    EXPECT_EQ(r.sum_x2, rw.sum_x2);
    EXPECT_EQ(r.sum_xy, rw.sum_xy);
    (void)w;
  }
}

TEST(Accumulators, CauchySchwarz) {
  synth::Rng rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    auto v = quarters(rng, 1 + rng.below(30));
    MomentAccumulator m = MomentAccumulator::from_values(v);
    EXPECT_GE(m.sum_v2 * m.n, m.sum_v * m.sum_v);
  }
  MomentAccumulator empty = MomentAccumulator::from_values({});
  EXPECT_EQ(empty.n, 0);
  EXPECT_EQ(empty.sum_v, 0);
  EXPECT_EQ(empty.sum_v2, 0);
}

TEST(Estimators, ScaleEquivariance) {
  synth::Rng rng(8);
  for (double k : {2.0, 0.5, -3.0, 10.0}) {
    auto v = quarters(rng, 30);
    std::vector<double> kv;
    for (double x : v) kv.push_back(k * x);
    Estimate a = mean_and_variance(MomentAccumulator::from_values(v));
    Estimate b = mean_and_variance(MomentAccumulator::from_values(kv));
    EXPECT_NEAR(b.value, k * a.value, 1e-12 * std::abs(k * a.value));
    EXPECT_NEAR(b.variance, k * k * a.variance, 1e-10 * k * k * a.variance);

    auto x = quarters(rng, 30, 4);
    for (auto& xi : x) xi += 1;
    Estimate d1 = delta_ratio_variance(RatioMoments::from_pairs(v, x));
    Estimate d2 = delta_ratio_variance(RatioMoments::from_pairs(kv, x));
    EXPECT_NEAR(d2.variance, k * k * d1.variance, 1e-9 * k * k * d1.variance);
  }
}

TEST(TwoSampleTest, FrozenExample) {
  TestResult r = two_sample_test({10.5, 0.25, 100}, {10.0, 0.16, 100});
  EXPECT_DOUBLE_EQ(r.delta, 0.5);
  EXPECT_NEAR(r.stderr_, 0.6403124237432849, 1e-15);
  EXPECT_NEAR(r.z, 0.7808688094430303, 1e-13);
  EXPECT_NEAR(r.p_value, 0.4348796584957835, 1e-12);
  EXPECT_NEAR(r.ci_low, -0.7549892992895836, 1e-12);
  EXPECT_NEAR(r.ci_high, 1.7549892992895836, 1e-12);
  ASSERT_TRUE(r.relative_delta);
  EXPECT_DOUBLE_EQ(*r.relative_delta, 0.05);
  EXPECT_EQ(r.n_t, 100);
}

TEST(TwoSampleTest, EqualValuesGivePOne) {
  TestResult r = two_sample_test({3, 0.5, 10}, {3, 0.5, 10});
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.z, 0.0);
}

TEST(TwoSampleTest, CriticalValue) {
  // z = 1.959964 exactly: variance chosen so delta / stderr == z.
  TestResult r = two_sample_test({1.959964, 0.5, 10}, {0, 0.5, 10});
  EXPECT_NEAR(r.p_value, 0.0500, 1e-4);
  EXPECT_NEAR(r.p_value, 0.0499999981928848, 1e-12);
}

TEST(TwoSampleTest, DegenerateVariance) {
  EXPECT_EQ(code_of([] { two_sample_test({0.1, 0, 5}, {0, 0, 5}); }), ErrorCode::DegenerateVariance);
  TestResult r = two_sample_test({2, 0, 5}, {2, 0, 5});
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(TwoSampleTest, ZeroControlHasNoRelativeDelta) {
  TestResult r = two_sample_test({1, 0.1, 5}, {0, 0.1, 5});
  EXPECT_FALSE(r.relative_delta);
}

TEST(TwoSampleTest, Antisymmetric) {
  synth::Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    Sample t{rng.unit() * 10, rng.unit() + 0.01, 50};
    Sample c{rng.unit() * 10, rng.unit() + 0.01, 60};
    TestResult a = two_sample_test(t, c);
    TestResult b = two_sample_test(c, t);
    EXPECT_EQ(a.delta, -b.delta);
    EXPECT_EQ(a.z, -b.z);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_LE(a.ci_low, a.ci_high);
    EXPECT_GE(a.stderr_, 0);
    EXPECT_GE(a.p_value, 0);
    EXPECT_LE(a.p_value, 1);
  }
}

TEST(NormalCdf, FrozenValues) {
  EXPECT_NEAR(normal_cdf(-3), 0.0013498980316300946, 1e-15);
  EXPECT_NEAR(normal_cdf(-1), 0.15865525393145705, 1e-15);
  EXPECT_EQ(normal_cdf(0), 0.5);
  EXPECT_NEAR(normal_cdf(0.5), 0.6914624612740131, 1e-15);
  EXPECT_NEAR(normal_cdf(2.5), 0.9937903346742238, 1e-15);
}

TEST(NormalCdf, MonotoneAndSymmetric) {
  double prev = 0;
  for (double z = -9; z <= 9; z += 0.01) {
    double p = normal_cdf(z);
    EXPECT_GE(p, prev);
    EXPECT_NEAR(p + normal_cdf(-z), 1.0, 1e-12);
    prev = p;
  }
}

TEST(Percentile, NearestRank) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  EXPECT_EQ(percentile_nearest_rank(v, 95), 95);
  EXPECT_EQ(percentile_nearest_rank(v, 100), 100);
  EXPECT_EQ(percentile_nearest_rank(v, 0.5), 1);
  EXPECT_EQ(percentile_nearest_rank({10, 20, 30, 40}, 50), 20);
  EXPECT_EQ(percentile_nearest_rank({10, 20, 30, 40}, 51), 30);
  EXPECT_EQ(percentile_nearest_rank({42}, 1), 42);
  EXPECT_EQ(percentile_nearest_rank({42}, 99), 42);
  EXPECT_EQ(nearest_rank_index(3, 100.0 / 3.0), 1u);
  EXPECT_EQ(code_of([] { percentile_nearest_rank({}, 50); }), ErrorCode::InsufficientSample);
}

TEST(CompensatedSum, RecoversCancelledLowBits) {
  CompensatedSum s;
  for (double x : {1e16, 1.0, -1e16}) s.add(x);
  EXPECT_EQ(s.value(), 1.0);
  CompensatedSum a, b;
  a.add(0.1);
  b.add(0.2);
  a.merge(b);
  EXPECT_DOUBLE_EQ(a.value(), 0.30000000000000004);
}

}  // namespace
}  // namespace metriq::stats
