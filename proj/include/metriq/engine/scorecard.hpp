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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/engine/config.hpp"
#include "metriq/plan/plan.hpp"
#include "metriq/stats/stats.hpp"
#include "metriq/value.hpp"

namespace metriq {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const;
};

/// Group key tuple -> value. Keys are [variant?][segment values...].
using GroupValues = std::map<std::vector<Value>, Value, KeyLess>;

/// Every root of a finalized plan evaluated at each of its groups. Both the
/// interpreter and executed SQL produce this form.
using RootValues = std::map<plan::RootKey, GroupValues>;

struct ScorecardRow {
  std::string metric;
  std::string slice;  // "(all)" or "Country=US, Browser=Chrome"
  std::vector<std::pair<std::string, Value>> segments;

  // business mode
  Value value;

  // experiment mode
  std::optional<plan::Estimator> estimator;
  Value value_t;
  Value value_c;
  Value n_t;
  Value n_c;
  std::optional<stats::TestResult> test;
  std::string note;
};

struct Scorecard {
  Mode mode = Mode::Experiment;
  std::string treatment;
  std::string control;
  std::vector<ScorecardRow> rows;
  std::string config_digest;
  std::string plan_digest;
};

struct AssemblyOptions {
  std::size_t max_segment_cardinality = 1000;
};

/// Builds rows ordered by metric name, then slice set order, then segment
/// values. Throws SegmentCardinality when a slice set has more distinct
/// segment tuples than allowed.
Scorecard assemble_scorecard(const plan::MetricsPlan& p, const RootValues& values, const AssemblyOptions& opts);

/// "Country=US, Browser=Chrome"
std::string slice_label(const std::vector<std::pair<std::string, Value>>& segments);

nlohmann::json scorecard_to_json(const Scorecard& sc);
std::string scorecard_to_csv(const Scorecard& sc);
/// Fixed-width human summary: metric, slice, delta (or value), p.
std::string scorecard_summary(const Scorecard& sc);

/// Cell-by-cell comparison: |a-b| <= rel*max(|a|,|b|) + abs, null == null.
/// Returns one message per mismatch; metadata is ignored.
std::vector<std::string> compare_scorecards(const Scorecard& a, const Scorecard& b, double rel = 1e-9,
                                            double abs = 1e-12);

}  // namespace metriq
