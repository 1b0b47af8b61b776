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

#include "metriq/error.hpp"
#include "metriq/frontend/parser.hpp"
#include "metriq/frontend/type_check.hpp"
#include "metriq/hash.hpp"
#include "metriq/plan/build.hpp"
#include "properties.hpp"
#include "util.hpp"

namespace metriq::plan {
namespace {

mdl::TypedMetricSet typed(const std::string& src, const DatasetSchema& schema = testing::website_schema()) {
  auto parsed = mdl::parse_metric_set(src);
  if (!parsed.ok()) throw Error(ErrorCode::Syntax, mdl::format(parsed.diagnostics.at(0)));
  auto checked = mdl::type_check(std::make_shared<const mdl::MetricSet>(*parsed.metric_set), schema);
  if (!checked.ok()) throw Error(ErrorCode::Type, mdl::format(checked.diagnostics.at(0)));
  return *checked.typed;
}

using testing::expression_plan;

NodeId root(const MetricsPlan& p) { return testing::only_root(p); }

TEST(BuildPlan, TwoWebsiteMetricsShareNothing) {
  AnalysisConfig cfg = testing::business_config();
  MetricsPlan p = build_plan(typed(testing::website_metrics()), cfg);
  EXPECT_EQ(p.size(), 5u);
  ASSERT_EQ(p.roots.size(), 2u);
  EXPECT_TRUE(p.roots.count({"AvgRevPerUser", kUnslicedId, Role::Value}));
  EXPECT_TRUE(p.roots.count({"PLT95", kUnslicedId, Role::Value}));
  std::set<std::string> leaves;
  for (const auto& n : p.nodes())
    if (n.op == Op::Column) leaves.insert(n.column);
  EXPECT_EQ(leaves, (std::set<std::string>{"PageLoadTime", "Revenue"}));
}

TEST(BuildPlan, GroupRequestSelectsOneRoot) {
  AnalysisConfig cfg = testing::business_config();
  cfg.metric_groups = std::vector<std::string>{"Revenue"};
  MetricsPlan p = build_plan(typed(testing::website_metrics()), cfg);
  ASSERT_EQ(p.roots.size(), 1u);
  EXPECT_EQ(p.roots.begin()->first.metric, "AvgRevPerUser");
}

TEST(BuildPlan, RequestErrors) {
  auto tms = typed(testing::website_metrics());
  AnalysisConfig cfg = testing::business_config();
  cfg.metrics = std::vector<std::string>{};
  try {
    build_plan(tms, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRequest);
  }
  cfg.metrics = std::vector<std::string>{"Nope"};
  try {
    build_plan(tms, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownMetric);
  }
  cfg.metrics.reset();
  cfg.metric_groups = std::vector<std::string>{"Nope"};
  try {
    build_plan(tms, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownGroup);
  }
}

TEST(BuildPlan, IndependentOfDeclarationOrder) {
  std::string a = "unit User = User;\nmetric A = Avg(Sum<User>(Revenue));\nmetric B = Sum(Revenue if Country == \"US\");\n"
                  "metric C = Avg(PageLoadTime);";
  std::string b = "unit User = User;\nmetric C = Avg(PageLoadTime);\nmetric B = Sum(Revenue if Country == \"US\");\n"
                  "metric A = Avg(Sum<User>(Revenue));";
  AnalysisConfig cfg = testing::experiment_config();
  cfg.metrics = std::vector<std::string>{"A", "B", "C"};
  MetricsPlan pa = build_plan(typed(a), cfg);
  MetricsPlan pb = build_plan(typed(b), cfg);
  EXPECT_EQ(pa.digest(), pb.digest());
  for (const auto& [key, id] : pa.roots) EXPECT_EQ(pa.node(id).hash, pb.node(pb.roots.at(key)).hash) << key.metric;
}

TEST(MetricsPlan, HashConsingSharesStructure) {
  MetricsPlan p;
  NodeId a = p.column("x");
  NodeId b = p.column("x");
  EXPECT_EQ(a, b);
  NodeId s1 = p.aggregation(AggKind::Sum, AggLevel::of_unit("User"), {a}, std::nullopt);
  NodeId s2 = p.aggregation(AggKind::Sum, AggLevel::of_unit("User"), {b}, std::nullopt);
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, p.aggregation(AggKind::Sum, AggLevel::of_unit("Session"), {a}, std::nullopt));
  EXPECT_EQ(p.size(), 3u);
}

TEST(MetricsPlan, HashIgnoresNodeIds) {
  MetricsPlan p, q;
  p.column("pad");
  NodeId x = p.column("x");
  NodeId y = q.column("x");
  EXPECT_NE(x, y);
  EXPECT_EQ(p.node(x).hash, q.node(y).hash);
}

TEST(Normalize, FoldsConstants) {
  MetricsPlan p = normalize(expression_plan("2 + 3"));
  const PlanNode& n = p.node(root(p));
  ASSERT_EQ(n.op, Op::Literal);
  EXPECT_EQ(n.literal, Value::number(5));
}

TEST(Normalize, ResolvesConstantBranch) {
  MetricsPlan p = normalize(expression_plan("if true then Clicks else Revenue"));
  EXPECT_EQ(p.node(root(p)).op, Op::Column);
  EXPECT_EQ(p.node(root(p)).column, "Clicks");
}

TEST(Normalize, SimplifiesIdentities) {
  auto same = [](const std::string& a, const std::string& b) {
    MetricsPlan pa = normalize(expression_plan(a));
    MetricsPlan pb = normalize(expression_plan(b));
    EXPECT_EQ(pa.node(root(pa)).hash, pb.node(root(pb)).hash) << a << " vs " << b;
  };
  same("Clicks + 0", "Clicks");
  same("1 * Clicks", "Clicks");
  same("-(-Clicks)", "Clicks");
  same("not not IsMobile", "IsMobile");
  same("Clicks + Revenue", "Revenue + Clicks");
  same("(IsMobile and Clicks > 1) and Revenue > 2", "Revenue > 2 and (Clicks > 1 and IsMobile)");
  same("if Revenue == null then 0 else Revenue", "if Revenue == null then 0 else Revenue");
  same("if IsMobile then Clicks else Clicks", "Clicks");
}

TEST(Normalize, NullGuardBecomesCoalesce) {
  MetricsPlan p = normalize(expression_plan("if Revenue == null then 0 else Revenue"));
  EXPECT_EQ(p.node(root(p)).op, Op::Coalesce);
}

TEST(Normalize, SubtractionIsNotCommuted) {
  MetricsPlan a = normalize(expression_plan("Clicks - Revenue"));
  MetricsPlan b = normalize(expression_plan("Revenue - Clicks"));
  EXPECT_NE(a.node(root(a)).hash, b.node(root(b)).hash);
}

TEST(TopoOrder, SingleNode) {
  MetricsPlan p;
  NodeId x = p.column("x");
  p.roots[{"m", "", Role::Value}] = x;
  EXPECT_EQ(topo_order(p), std::vector<NodeId>{x});
}

TEST(TopoOrder, ChildrenBeforeParents) {
  AnalysisConfig cfg = testing::business_config();
  cfg.metrics = std::vector<std::string>{"AvgRevPerUser"};
  MetricsPlan p = build_plan(typed(testing::website_metrics()), cfg);
  std::vector<std::string> labels;
  for (NodeId id : topo_order(p)) labels.push_back(node_label(p, id));
  EXPECT_EQ(labels, (std::vector<std::string>{"Revenue", "Sum<User>", "Avg"}));
}

TEST(TopoOrder, CycleIsAnInvariantBreach) {
  std::vector<PlanNode> table(2);
  table[0].op = Op::Unary;
  table[0].children = {1};
  table[1].op = Op::Unary;
  table[1].children = {0};
  try {
    topo_order(table);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CycleDetected);
    EXPECT_TRUE(e.is_internal());
  }
}

TEST(TopoOrder, ForwardReferencesAreRejected) {
  // Children must exist before their parents, so a cycle cannot be built.
  MetricsPlan p;
  PlanNode a;
  a.op = Op::Unary;
  a.children = {1};
  try {
    p.append_raw(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Internal);
    EXPECT_TRUE(e.is_internal());
  }
  EXPECT_EQ(p.size(), 0u);
}

TEST(Verify, RejectsAggregationOverPopulationValue) {
  MetricsPlan p;
  p.schema = testing::website_schema();
  NodeId x = p.column("Revenue");
  NodeId inner = p.aggregation(AggKind::Sum, AggLevel::population(), {x}, std::nullopt);
  NodeId outer = p.aggregation(AggKind::Avg, AggLevel::population(), {inner}, std::nullopt);
  p.roots[{"m", "", Role::Value}] = outer;
  EXPECT_THROW(verify(p), Error);
}

TEST(Explain, JsonListsNodesRootsAndDigest) {
  AnalysisConfig cfg = testing::business_config();
  MetricsPlan p = build_plan(typed(testing::website_metrics()), cfg);
  auto j = explain_json(p);
  EXPECT_EQ(j["nodes"].size(), p.size());
  EXPECT_EQ(j["roots"].size(), 2u);
  EXPECT_EQ(j["digest"], hex_digest(p.digest()));
  std::string dot = explain_dot(p, "t");
  EXPECT_EQ(dot.rfind("digraph", 0), 0u) << dot;
  EXPECT_NE(dot.find("Sum<User>"), std::string::npos);
}

// Idempotence, exact row semantics, commutative mirror hashing and hash
// soundness over 1000 random row expressions.
TEST(NormalizeProperties, OverThousandRandomTrees) {
  testing::NormalizationCheck r = testing::check_normalization(424242, 1000);
  EXPECT_EQ(r.trees, 1000u);
  EXPECT_GT(r.rows_compared, 100000u);
  EXPECT_GT(r.distinct_hashes, 1000u);
  EXPECT_TRUE(r.ok()) << r.first_failure << "\nnot idempotent " << r.not_idempotent << ", value changes "
                      << r.value_changes << ", mirror mismatches " << r.mirror_mismatches << ", collisions "
                      << r.collisions;
}

}  // namespace
}  // namespace metriq::plan
