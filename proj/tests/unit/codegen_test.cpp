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

#include <cstdlib>
#include <regex>
#include <set>

#include "metriq/codegen/dialect.hpp"
#include "metriq/codegen/emit.hpp"
#include "metriq/driver.hpp"
#include "metriq/error.hpp"
#include "metriq/synth/synth.hpp"
#include "util.hpp"

namespace metriq::codegen {
namespace {

template <class F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::Internal, "");
}

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

EmittedProgram emit_for(const std::string& src, const AnalysisConfig& cfg, const FabricDialect& d = ansi_dialect(),
                        const DatasetSchema& schema = testing::website_schema()) {
  return emit(compile_metrics(src, schema, cfg).plan(), d);
}

// Golden files live in tests/golden; METRIQ_UPDATE_GOLDEN=1 rewrites them.
void expect_golden(const std::string& name, const std::string& text) {
  auto path = std::filesystem::path(METRIQ_GOLDEN_DIR) / name;
  if (const char* update = std::getenv("METRIQ_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    testing::write_text(path, text);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path << " missing; run with METRIQ_UPDATE_GOLDEN=1";
  EXPECT_EQ(testing::read_text(path), text) << "golden mismatch: " << name;
}

TEST(Golden, WebsiteExperimentAnsi) {
  expect_golden("website_experiment.ansi.sql",
                emit_for(testing::website_metrics(), load_config(testing::fixture("experiment.json"))).text);
}

TEST(Golden, WebsiteExperimentWarehouse) {
  expect_golden("website_experiment.warehouse.sql",
                emit_for(testing::website_metrics(), load_config(testing::fixture("experiment.json")),
                         warehouse_dialect())
                    .text);
}

TEST(Golden, WebsiteBusinessAnsi) {
  expect_golden("website_business.ansi.sql",
                emit_for(testing::website_metrics(), load_config(testing::fixture("business.json"))).text);
}

TEST(Emit, AverageRevenuePerUserIsTwoLevel) {
  AnalysisConfig cfg = testing::business_config();
  cfg.metrics = std::vector<std::string>{"AvgRevPerUser"};
  std::string text = emit_for(testing::website_metrics(), cfg).text;
  EXPECT_NE(text.find("GROUP BY \"User\""), std::string::npos) << text;
  EXPECT_NE(text.find("AVG(\"e"), std::string::npos) << text;
  EXPECT_NE(text.find("SUM(\"Revenue\")"), std::string::npos) << text;
}

TEST(Emit, SharedInnerSumEmittedOnce) {
  std::string src = "unit User = User;\nmetric A = Avg(Sum<User>(Revenue));\nmetric B = Max(Sum<User>(Revenue));";
  for (const AnalysisConfig& cfg : {testing::business_config(), testing::experiment_config()}) {
    std::string text = emit_for(src, cfg).text;
    EXPECT_EQ(occurrences(text, "SUM(\"Revenue\")"), 1u) << text;
  }
}

TEST(Emit, PercentileNeedsCapability) {
  FabricDialect d = ansi_dialect();
  d.name = "no-percentile";
  d.capabilities.erase("percentile");
  d.capabilities.erase("percentile_rank");
  Error e = error_of([&] { emit_for(testing::website_metrics(), testing::business_config(), d); });
  EXPECT_EQ(e.code(), ErrorCode::UnsupportedConstruct);
  EXPECT_NE(std::string(e.what()).find("PLT95"), std::string::npos) << e.what();
  AnalysisConfig cfg = testing::business_config();
  cfg.metrics = std::vector<std::string>{"AvgRevPerUser"};
  EXPECT_NO_THROW(emit_for(testing::website_metrics(), cfg, d));
}

TEST(Emit, RequiresFinalizedPlan) {
  Compiled c = compile_metrics(testing::website_metrics(), testing::website_schema(), testing::business_config());
  EXPECT_EQ(error_of([&] { emit(c.initial, ansi_dialect()); }).code(), ErrorCode::PlanNotFinalized);
}

TEST(Emit, Deterministic) {
  AnalysisConfig cfg = load_config(testing::fixture("experiment.json"));
  EmittedProgram a = emit_for(testing::website_metrics(), cfg);
  EmittedProgram b = emit_for(testing::website_metrics(), cfg);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.plan_digest, b.plan_digest);
  EXPECT_EQ(output_schema_json(a).dump(), output_schema_json(b).dump());
}

TEST(Emit, OutputSchemaMatchesRoots) {
  AnalysisConfig cfg = load_config(testing::fixture("experiment.json"));
  Compiled c = compile_metrics(testing::website_metrics(), testing::website_schema(), cfg);
  EmittedProgram prog = emit(c.plan(), ansi_dialect());
  std::set<std::string> names;
  for (const auto& col : prog.columns) names.insert(col.name);
  std::set<std::string> want = {"slice", "variant", "seg.Country", "metric.AvgRevPerUser", "metric.PLT95",
                                "moment.AvgRevPerUser.n", "moment.AvgRevPerUser.sum_v",
                                "moment.AvgRevPerUser.sum_v2"};
  EXPECT_EQ(names, want);
  auto j = output_schema_json(prog);
  EXPECT_EQ(j["dialect"], "ansi");
  EXPECT_EQ(j["columns"].size(), prog.columns.size());
}

TEST(Emit, BusinessModeHasNoAssignmentOrMoments) {
  EmittedProgram prog = emit_for(testing::website_metrics(), load_config(testing::fixture("business.json")));
  EXPECT_EQ(prog.text.find("Variant"), std::string::npos) << prog.text;
  EXPECT_EQ(prog.text.find("moment."), std::string::npos);
  EXPECT_EQ(prog.text.find("\"variant\""), std::string::npos);
  for (const auto& c : prog.columns) {
    EXPECT_NE(c.kind, OutputColumn::Kind::Moment);
    EXPECT_NE(c.kind, OutputColumn::Kind::Variant);
  }
}

TEST(Emit, WarehouseSyntax) {
  std::string text =
      emit_for(testing::website_metrics(), load_config(testing::fixture("experiment.json")), warehouse_dialect()).text;
  EXPECT_NE(text.find("`Revenue`"), std::string::npos);
  EXPECT_NE(text.find("percentile_approx(`PageLoadTime`, 0.95)"), std::string::npos) << text;
  EXPECT_EQ(text.find("\"Revenue\""), std::string::npos);
}

// Every schema column the text quotes is reachable in the pruned plan.
TEST(Emit, ColumnHygieneOverGeneratedCases) {
  std::regex quoted("\"([^\"]+)\"");
  std::size_t programs = 0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    synth::Case c = synth::generate_case(seed);
    Compiled compiled;
    try {
      compiled = compile_metrics(c.metrics_source, c.schema, c.config);
    } catch (const Error&) {
      continue;
    }
    const auto& p = compiled.plan();
    std::set<std::string> live;
    auto reach = p.reachable();
    for (plan::NodeId id = 0; id < p.size(); ++id)
      if (reach[id] && p.node(id).op == plan::Op::Column) live.insert(p.node(id).column);
    if (p.assignment) live.insert(p.assignment->column);
    std::string text = emit(p, ansi_dialect()).text;
    ++programs;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), quoted); it != std::sregex_iterator(); ++it) {
      std::string name = (*it)[1];
      if (c.schema.find(name)) {
        EXPECT_TRUE(live.count(name)) << "seed " << seed << " quotes dead column " << name;
      }
    }
  }
  EXPECT_GT(programs, 100u);
}

TEST(Dialect, BuiltinsPassSelfCheck) {
  EXPECT_NO_THROW(self_check(ansi_dialect()));
  EXPECT_NO_THROW(self_check(warehouse_dialect()));
  EXPECT_TRUE(ansi_dialect().capabilities.count("percentile_rank"));
  EXPECT_TRUE(warehouse_dialect().capabilities.count("percentile"));
}

TEST(Dialect, QuotingDoublesDelimiters) {
  EXPECT_EQ(ansi_dialect().ident("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(ansi_dialect().string_literal("it's"), "'it''s'");
  EXPECT_EQ(warehouse_dialect().ident("a`b"), "`a``b`");
  EXPECT_EQ(ansi_dialect().render("div", {"x", "y"}), ansi_dialect().render("div", {"x", "y"}));
}

TEST(Registry, RegisterAndLookup) {
  DialectRegistry r;
  r.register_dialect(ansi_dialect());
  EXPECT_TRUE(r.contains("ansi"));
  EXPECT_EQ(r.get("ansi").name, "ansi");
  EXPECT_EQ(error_of([&] { r.register_dialect(ansi_dialect()); }).code(), ErrorCode::DuplicateDialect);
}

TEST(Registry, MissingDivisionTemplate) {
  FabricDialect d = ansi_dialect();
  d.name = "broken";
  d.templates.erase("div");
  ASSERT_TRUE(d.capabilities.count("arithmetic"));
  DialectRegistry r;
  Error e = error_of([&] { r.register_dialect(d); });
  EXPECT_EQ(e.code(), ErrorCode::IncompleteDialect);
  EXPECT_NE(std::string(e.what()).find("div"), std::string::npos) << e.what();
  EXPECT_FALSE(r.contains("broken"));
}

TEST(Registry, UnknownFabricListsNames) {
  Error e = error_of([] { DialectRegistry::with_builtins().get("nonexistent"); });
  EXPECT_EQ(e.code(), ErrorCode::UnknownFabric);
  std::string msg = e.what();
  EXPECT_NE(msg.find("ansi"), std::string::npos) << msg;
  EXPECT_NE(msg.find("warehouse"), std::string::npos) << msg;
  EXPECT_EQ(DialectRegistry::with_builtins().names(), (std::vector<std::string>{"ansi", "warehouse"}));
}

TEST(Registry, DescriptorRoundTrip) {
  for (const FabricDialect* d : {&ansi_dialect(), &warehouse_dialect()}) {
    FabricDialect back = dialect_from_json(dialect_to_json(*d));
    EXPECT_EQ(back.templates, d->templates);
    EXPECT_EQ(back.capabilities, d->capabilities);
    EXPECT_EQ(back.types, d->types);
  }
  EXPECT_THROW(dialect_from_json(nlohmann::json::array()), Error);
}

TEST(Registry, LoadsDescriptorsFromEnvironment) {
  auto dir = testing::temp_dir("fabrics");
  auto j = dialect_to_json(ansi_dialect());
  j["name"] = "lakehouse";
  testing::write_text(dir / "lakehouse.json", j.dump(2));
  testing::write_text(dir / "notes.txt", "ignored");
  ::setenv("METRIQ_FABRIC_DIR", dir.c_str(), 1);
  DialectRegistry r = DialectRegistry::from_environment();
  ::unsetenv("METRIQ_FABRIC_DIR");
  EXPECT_EQ(r.names(), (std::vector<std::string>{"ansi", "lakehouse", "warehouse"}));
  EmittedProgram prog = emit_for(testing::website_metrics(), testing::business_config(), r.get("lakehouse"));
  EXPECT_EQ(prog.dialect, "lakehouse");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace metriq::codegen
