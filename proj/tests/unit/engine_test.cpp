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

#include "metriq/driver.hpp"
#include "metriq/engine/interpreter.hpp"
#include "metriq/engine/oracle.hpp"
#include "metriq/engine/scorecard.hpp"
#include "metriq/error.hpp"
#include "util.hpp"

namespace metriq {
namespace {

using testing::website_rows;

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

Scorecard run(const std::string& src, const Dataset& ds, const AnalysisConfig& cfg) {
  Compiled c = compile_metrics(src, ds.schema, cfg);
  return run_analysis(c, ds, cfg);
}

const ScorecardRow& row(const Scorecard& sc, const std::string& metric, const std::string& slice = "(all)") {
  for (const auto& r : sc.rows)
    if (r.metric == metric && r.slice == slice) return r;
  throw Error(ErrorCode::Internal, "no row " + metric + " " + slice);
}

Dataset revenue_fixture() {
  return website_rows({{"A", "3", "1", "US", "Chrome", "treatment"},
                       {"A", "7", "1", "US", "Chrome", "treatment"},
                       {"B", "0", "1", "DE", "Chrome", "control"}});
}

TEST(ExecutePlan, AverageRevenuePerUser) {
  Scorecard sc = run(testing::website_metrics(), revenue_fixture(), testing::business_config());
  EXPECT_EQ(row(sc, "AvgRevPerUser").value, Value::number(5.0));
}

TEST(ExecutePlan, Percentile95OfOneToHundred) {
  std::vector<std::array<std::string, 6>> rows;
  for (int i = 100; i >= 1; --i) rows.push_back({"U" + std::to_string(i % 7), "", std::to_string(i), "US", "C", "t"});
  Scorecard sc = run(testing::website_metrics(), website_rows(rows), testing::business_config());
  EXPECT_EQ(row(sc, "PLT95").value, Value::number(95));
}

TEST(ExecutePlan, BusinessRowsCarryOnlyValues) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  Scorecard sc = run(testing::website_metrics(), ds, testing::business_config({"Country"}));
  EXPECT_EQ(sc.mode, Mode::Business);
  ASSERT_EQ(sc.rows.size(), 6u);
  for (const auto& r : sc.rows) {
    EXPECT_FALSE(r.test);
    EXPECT_FALSE(r.estimator);
    EXPECT_TRUE(r.value_t.is_null());
  }
  EXPECT_EQ(row(sc, "AvgRevPerUser").value, Value::number(5));
  EXPECT_EQ(row(sc, "PLT95").value, Value::number(3));
  EXPECT_EQ(row(sc, "AvgRevPerUser", "Country=US").value, Value::number(5));
}

TEST(ExecutePlan, ExperimentRowsOnFixture) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  Scorecard sc = run(testing::website_metrics(), ds, testing::experiment_config());
  const auto& arpu = row(sc, "AvgRevPerUser");
  EXPECT_EQ(arpu.estimator, plan::Estimator::Standard);
  EXPECT_EQ(arpu.value_t, Value::number(10));
  EXPECT_EQ(arpu.value_c, Value::number(0));
  EXPECT_EQ(arpu.n_t, Value::number(1));
  EXPECT_FALSE(arpu.test);
  EXPECT_EQ(arpu.note, "insufficient sample");
  const auto& plt = row(sc, "PLT95");
  EXPECT_EQ(plt.estimator, plan::Estimator::Unsupported);
  EXPECT_EQ(plt.value_t, Value::number(2.5));
  EXPECT_EQ(plt.value_c, Value::number(3));
  EXPECT_EQ(plt.note, "n/a: no variance estimator");
}

TEST(ExecutePlan, TestedRowCarriesResult) {
  Dataset ds = website_rows({{"A", "3", "1", "US", "C", "treatment"},
                             {"B", "5", "1", "US", "C", "treatment"},
                             {"C", "8", "1", "US", "C", "treatment"},
                             {"D", "1", "1", "US", "C", "control"},
                             {"E", "2", "1", "US", "C", "control"},
                             {"F", "6", "1", "US", "C", "control"},
                             {"G", "9", "1", "US", "C", "holdout"}});
  Scorecard sc = run(testing::website_metrics(), ds, testing::experiment_config());
  const auto& r = row(sc, "AvgRevPerUser");
  ASSERT_TRUE(r.test);
  EXPECT_DOUBLE_EQ(r.value_t.as_number(), 16.0 / 3);
  EXPECT_DOUBLE_EQ(r.value_c.as_number(), 3.0);
  EXPECT_EQ(r.n_t, Value::number(3));
  // s_t^2 = 19/3, s_c^2 = 7 -> stderr^2 = 19/9 + 7/3
  EXPECT_NEAR(r.test->stderr_, std::sqrt(19.0 / 9 + 7.0 / 3), 1e-12);
}

TEST(ExecutePlan, UnfinalizedPlanRejected) {
  Dataset ds = revenue_fixture();
  Compiled c = compile_metrics(testing::website_metrics(), ds.schema, testing::business_config());
  EXPECT_EQ(code_of([&] { execute_plan(c.initial, ds); }), ErrorCode::PlanNotFinalized);
}

TEST(ExecutePlan, ContaminatedAssignment) {
  Dataset ds = website_rows({{"A", "1", "1", "US", "C", "treatment"}, {"A", "2", "1", "US", "C", "control"}});
  EXPECT_EQ(code_of([&] { run(testing::website_metrics(), ds, testing::experiment_config()); }),
            ErrorCode::ContaminatedAssignment);
}

TEST(ExecutePlan, SegmentCardinalityGuard) {
  std::vector<std::array<std::string, 6>> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({"U", "1", "1", "C" + std::to_string(i), "B", "t"});
  AnalysisConfig cfg = testing::business_config({"Country"});
  cfg.max_segment_cardinality = 10;
  EXPECT_EQ(code_of([&] { run(testing::website_metrics(), website_rows(rows), cfg); }),
            ErrorCode::SegmentCardinality);
}

TEST(ExecutePlan, EmptyDataset) {
  Dataset ds = website_rows({});
  for (const AnalysisConfig& cfg : {testing::business_config({"Country"}), testing::experiment_config({"Country"})}) {
    Scorecard sc = run(testing::website_metrics(), ds, cfg);
    ASSERT_EQ(sc.rows.size(), 2u);
    for (const auto& r : sc.rows) {
      EXPECT_EQ(r.slice, "(all)");
      EXPECT_FALSE(r.test);
    }
    EXPECT_TRUE(compare_scorecards(sc, brute_force_oracle(testing::website_metrics(), ds, cfg)).empty());
  }
}

TEST(ExecutePlan, DivisionByZeroIsNullNotError) {
  Dataset ds = revenue_fixture();
  Scorecard sc = run("metric R = Sum(Revenue / (PageLoadTime - 1));", ds, testing::business_config());
  EXPECT_EQ(row(sc, "R").value, Value::number(0));
  sc = run("metric R = Avg(Revenue / (PageLoadTime - 1));", ds, testing::business_config());
  EXPECT_TRUE(row(sc, "R").value.is_null());
}

TEST(ExecutePlan, SliceAdditivity) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  std::string src = "unit User = User;\nsegment Country = Country;\nsegment Browser = Browser;\n"
                    "metric S = Sum(Revenue);\nmetric C = Count(PageLoadTime if Browser == \"Chrome\");\n"
                    "metric U = Sum(Sum<User>(Revenue + 0.25));";
  for (std::string seg : {"Country", "Browser"}) {
    Scorecard sc = run(src, ds, testing::business_config({seg}));
    for (const std::string m : {"S", "C", "U"}) {
      double total = 0;
      for (const auto& r : sc.rows)
        if (r.metric == m && r.slice != "(all)") total += r.value.as_number();
      EXPECT_EQ(total, row(sc, m).value.as_number()) << m << " by " << seg;
    }
  }
}

TEST(Oracle, MatchesInterpreterOnFixture) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  for (const AnalysisConfig& cfg : {testing::business_config({"Country"}), testing::experiment_config({"Country"})}) {
    Scorecard a = run(testing::website_metrics(), ds, cfg);
    Scorecard b = brute_force_oracle(testing::website_metrics(), ds, cfg);
    EXPECT_TRUE(compare_scorecards(a, b).empty());
  }
  Scorecard o = brute_force_oracle(testing::website_metrics(), revenue_fixture(), testing::business_config());
  EXPECT_EQ(row(o, "AvgRevPerUser").value, Value::number(5.0));
}

TEST(Scorecard, JsonShape) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  Scorecard sc = run(testing::website_metrics(), ds, testing::experiment_config({"Country"}));
  auto j = scorecard_to_json(sc);
  EXPECT_EQ(j["mode"], "experiment");
  EXPECT_EQ(j["rows"].size(), 6u);
  EXPECT_EQ(j["rows"][0]["metric"], "AvgRevPerUser");
  EXPECT_EQ(j["rows"][0]["slice"], "(all)");
  EXPECT_EQ(j["rows"][1]["segments"]["Country"], "DE");
  EXPECT_TRUE(j["rows"][0].contains("treatment"));
  EXPECT_EQ(j["metadata"]["plan_digest"].get<std::string>().size(), 16u);
  EXPECT_EQ(scorecard_to_json(sc).dump(2), j.dump(2));
}

TEST(Scorecard, BusinessCsvHasNoStatistics) {
  Dataset ds = load_dataset(testing::fixture("website.csv"), testing::website_schema());
  Scorecard sc = run(testing::website_metrics(), ds, testing::business_config({"Country"}));
  std::string text = scorecard_to_csv(sc);
  EXPECT_EQ(text.substr(0, text.find('\n')), "metric,slice,value");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.find("p_value"), std::string::npos);
  EXPECT_NE(text.find("AvgRevPerUser,Country=US,5\n"), std::string::npos) << text;
  EXPECT_EQ(scorecard_to_json(sc)["rows"][0].contains("test"), false);
}

TEST(Scorecard, CompareReportsMismatches) {
  Dataset ds = revenue_fixture();
  Scorecard a = run(testing::website_metrics(), ds, testing::business_config());
  Scorecard b = a;
  EXPECT_TRUE(compare_scorecards(a, b).empty());
  b.rows[0].value = Value::number(5.000001);
  EXPECT_EQ(compare_scorecards(a, b).size(), 1u);
  EXPECT_TRUE(compare_scorecards(a, b, 1e-3).empty());
  b.rows.pop_back();
  EXPECT_FALSE(compare_scorecards(a, b).empty());
}

TEST(Scorecard, SliceLabel) {
  EXPECT_EQ(slice_label({}), "(all)");
  EXPECT_EQ(slice_label({{"Country", Value::string("US")}, {"Browser", Value::string("Chrome")}}),
            "Country=US, Browser=Chrome");
  EXPECT_EQ(slice_label({{"Mobile", Value::boolean(true)}}), "Mobile=true");
}

}  // namespace
}  // namespace metriq
