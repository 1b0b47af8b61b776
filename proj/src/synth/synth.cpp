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

#include "metriq/synth/synth.hpp"

#include <set>

namespace metriq::synth {

namespace {

const std::vector<std::string> kNumeric = {"Revenue", "Clicks", "LoadTime", "Score"};
const std::vector<std::string> kCountries = {"US", "DE", "JP", "BR"};
const std::vector<std::string> kPlatforms = {"web", "ios", "android"};

// Segment name -> definition.
const std::vector<std::pair<std::string, std::string>> kSegments = {
    {"Country", "Country"},
    {"Platform", "Platform"},
    {"Mobile", "IsMobile"},
    {"Tier", "if Revenue > 10 then \"high\" else \"low\""},
    {"Busy", "Clicks >= 2"},
};

std::string quarter_literal(Rng& rng, int lo, int hi) {
  int q = lo * 4 + static_cast<int>(rng.below(static_cast<std::size_t>((hi - lo) * 4 + 1)));
  double v = q / 4.0;
  return format_number(v);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.below(v.size())];
}

std::string numeric(Rng& rng, int depth);
std::string boolean(Rng& rng, int depth);

std::string numeric(Rng& rng, int depth) {
  if (depth <= 0 || rng.chance(0.35)) {
    if (rng.chance(0.8)) return pick(rng, kNumeric);
    return quarter_literal(rng, 0, 5);
  }
  switch (rng.below(7)) {
    case 0: return "(" + numeric(rng, depth - 1) + " + " + numeric(rng, depth - 1) + ")";
    case 1: return "(" + numeric(rng, depth - 1) + " - " + numeric(rng, depth - 1) + ")";
    case 2: return "(" + numeric(rng, depth - 1) + " * " + numeric(rng, depth - 1) + ")";
    case 3: return "(" + numeric(rng, depth - 1) + " / " + numeric(rng, depth - 1) + ")";
    case 4: return "(if " + boolean(rng, depth - 1) + " then " + numeric(rng, depth - 1) + " else " +
                   numeric(rng, depth - 1) + ")";
    case 5: return "-(" + numeric(rng, depth - 1) + ")";
    default: return "(" + numeric(rng, depth - 1) + " + 0)";
  }
}

std::string boolean(Rng& rng, int depth) {
  static const std::vector<std::string> cmp = {"<", "<=", ">", ">=", "==", "!="};
  if (depth <= 0 || rng.chance(0.3)) {
    switch (rng.below(5)) {
      case 0: return "IsMobile";
      case 1: return "Country == \"" + pick(rng, kCountries) + "\"";
      case 2: return pick(rng, kNumeric) + " == null";
      case 3: return pick(rng, kNumeric) + " != null";
      default: return pick(rng, kNumeric) + " " + pick(rng, cmp) + " " + quarter_literal(rng, 0, 5);
    }
  }
  switch (rng.below(5)) {
    case 0: return "(" + boolean(rng, depth - 1) + " and " + boolean(rng, depth - 1) + ")";
    case 1: return "(" + boolean(rng, depth - 1) + " or " + boolean(rng, depth - 1) + ")";
    case 2: return "not (" + boolean(rng, depth - 1) + ")";
    case 3: return "(" + numeric(rng, depth - 1) + " " + pick(rng, cmp) + " " + numeric(rng, depth - 1) + ")";
    default: return "(Platform == \"" + pick(rng, kPlatforms) + "\")";
  }
}

std::string maybe_filter(Rng& rng) { return rng.chance(0.3) ? " if " + boolean(rng, 1) : ""; }

std::string random_metric(Rng& rng) {
  static const std::vector<std::string> unit_aggs = {"Sum", "Count", "Avg", "Min", "Max"};
  std::string x = numeric(rng, 2);
  switch (rng.below(12)) {
    case 0:
    case 1:
    case 2: return "Avg(Sum<User>(" + x + maybe_filter(rng) + "))";
    case 3: {
      const std::string& a = pick(rng, unit_aggs);
      if (a == "Count") return rng.chance(0.5) ? "Avg(Count<User>())" : "Avg(Count<User>(" + x + "))";
      return "Avg(" + a + "<User>(" + x + maybe_filter(rng) + "))";
    }
    case 4:
    case 5:
    case 6: return "Avg(" + x + maybe_filter(rng) + ")";
    case 7: return "Percentile(" + x + ", " + std::to_string(1 + rng.below(100)) + maybe_filter(rng) + ")";
    case 8: {
      static const std::vector<std::string> pop = {"Sum", "Min", "Max"};
      return pick(rng, pop) + "(" + x + maybe_filter(rng) + ")";
    }
    case 9: return rng.chance(0.5) ? "Count()" : "Count(" + x + maybe_filter(rng) + ")";
    case 10: return "Avg(Sum<Session>(" + x + "))";
    default: {
      static const std::vector<std::string> outer = {"Sum", "Max", "Count"};
      if (rng.chance(0.3)) return "Percentile(Sum<User>(" + x + "), 50)";
      return pick(rng, outer) + "(Sum<User>(" + x + "))";
    }
  }
}

}  // namespace

std::string random_row_expression(Rng& rng, int depth, bool is_bool) {
  return is_bool ? boolean(rng, depth) : numeric(rng, depth);
}

DatasetSchema synthetic_schema() {
  DatasetSchema s;
  s.columns = {
      {"UserId", ValueType::String, false},  {"SessionId", ValueType::String, false},
      {"Variant", ValueType::String, false}, {"Revenue", ValueType::Number, true},
      {"Clicks", ValueType::Number, false},  {"LoadTime", ValueType::Number, true},
      {"Score", ValueType::Number, true},    {"Country", ValueType::String, true},
      {"Platform", ValueType::String, false}, {"IsMobile", ValueType::Bool, false},
  };
  s.units = {{"User", "UserId"}};
  return s;
}

Case generate_case(std::uint64_t seed, const CaseLimits& limits) {
  Rng rng(seed);
  Case c;
  c.seed = seed;
  c.schema = synthetic_schema();

  // metric set
  std::string src = "// generated case " + std::to_string(seed) + "\nunit Session = SessionId;\n";
  for (const auto& [name, def] : kSegments) src += "segment " + name + " = " + def + ";\n";
  std::size_t metric_count = 1 + rng.below(limits.max_metrics);
  std::string shared = "Sum<User>(" + numeric(rng, 1) + ")";
  std::vector<std::string> names;
  std::vector<std::string> in_a;
  for (std::size_t i = 0; i < metric_count; ++i) {
    std::string name = "M" + std::to_string(i);
    names.push_back(name);
    std::string def = rng.chance(0.15) ? "Avg(" + shared + ")" : random_metric(rng);
    bool group_a = rng.chance(0.5);
    if (group_a) in_a.push_back(name);
    src += "metric " + name + (group_a ? " in A" : " in B") + " = " + def + ";\n";
  }
  c.metrics_source = src;

  // data
  std::size_t units = 1 + rng.below(limits.max_units);
  std::size_t rows = rng.chance(0.03) ? 0 : 1 + rng.below(limits.max_rows);
  std::vector<std::string> variant_of(units);
  for (auto& v : variant_of) v = rng.chance(0.05) ? "holdout" : (rng.chance(0.5) ? "treatment" : "control");
  c.data.schema = c.schema;
  c.data.columns.assign(c.schema.columns.size(), {});
  c.data.row_count = rows;
  auto maybe_null = [&](Value v, double p) { return rng.chance(p) ? Value::null() : v; };
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t u = rng.below(units);
    std::size_t session = rng.below(3);
    auto& col = c.data.columns;
    col[0].push_back(Value::string("u" + std::to_string(u)));
    col[1].push_back(Value::string("u" + std::to_string(u) + "s" + std::to_string(session)));
    col[2].push_back(Value::string(variant_of[u]));
    col[3].push_back(maybe_null(Value::number(static_cast<double>(rng.below(81)) / 4.0), 0.3));
    col[4].push_back(Value::number(static_cast<double>(rng.below(6))));
    col[5].push_back(maybe_null(Value::number(static_cast<double>(1 + rng.below(40)) / 4.0), 0.1));
    col[6].push_back(maybe_null(Value::number(static_cast<double>(rng.below(11)) - 5.0), 0.2));
    col[7].push_back(maybe_null(Value::string(pick(rng, kCountries)), 0.1));
    col[8].push_back(Value::string(pick(rng, kPlatforms)));
    col[9].push_back(Value::boolean(rng.chance(0.4)));
  }

  // config
  AnalysisConfig& cfg = c.config;
  cfg.mode = rng.chance(0.8) ? Mode::Experiment : Mode::Business;
  if (cfg.mode == Mode::Experiment) {
    cfg.assignment_column = "Variant";
    cfg.randomization_unit = "User";
  }
  std::size_t seg_count = rng.below(limits.max_segments + 1);
  std::set<std::size_t> chosen;
  while (chosen.size() < seg_count) chosen.insert(rng.below(kSegments.size()));
  for (std::size_t s : chosen) cfg.segments.segments.push_back(kSegments[s].first);
  if (seg_count == 2 && rng.chance(0.3)) cfg.segments.combine.push_back(cfg.segments.segments);
  if (seg_count > 0 && rng.chance(0.1)) cfg.segments.include_overall = false;
  switch (rng.below(4)) {
    case 0:
      if (!in_a.empty()) cfg.metric_groups = std::vector<std::string>{"A"};
      break;
    case 1: cfg.metrics = std::vector<std::string>{pick(rng, names)}; break;
    default: break;
  }
  return c;
}

}  // namespace metriq::synth
