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
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/engine/config.hpp"
#include "metriq/plan/plan.hpp"

namespace metriq::transforms {

struct PassReport {
  std::string pass;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t added = 0;    // by structural hash multiset
  std::size_t removed = 0;
  std::map<std::string, plan::Estimator> estimators;
  bool skipped = false;
  std::string note;

  nlohmann::json to_json() const;
};

struct PassResult {
  plan::MetricsPlan plan;
  PassReport report;
};

/// Standard for Avg over a per-unit aggregation on the randomization unit,
/// DeltaRatio for Avg over row values, Unsupported otherwise.
/// Throws UnknownUnit when the randomization unit is not declared.
plan::Estimator select_variance_estimator(const plan::MetricsPlan& p, plan::NodeId metric_root,
                                          const std::string& randomization_unit);

PassResult normalize_pass(const plan::MetricsPlan& p);

/// Adds moment roots per metric: n, sum_v, sum_v2 (Standard) or n, sum_y,
/// sum_x, sum_y2, sum_x2, sum_xy over per-unit (y, x) (DeltaRatio).
/// Skipped in business mode.
PassResult enrich_variance(const plan::MetricsPlan& p, const AnalysisConfig& cfg);

/// Replaces each unsliced root by one GroupedAggregation copy per slice
/// set, keyed by (variant, segment values...); unit-level aggregations are
/// additionally keyed by the unit's key column.
PassResult enrich_segments(const plan::MetricsPlan& p, const SegmentSpec& spec);

/// Keeps only roots of `requested` metrics and the nodes they reach.
/// Throws UnknownMetric or EmptyRequest.
PassResult prune_unused(const plan::MetricsPlan& p, const std::vector<std::string>& requested);

PassResult dedup_common_subexpressions(const plan::MetricsPlan& p);

/// IsNull(c) -> false and Coalesce(c, k) -> c for non-nullable columns,
/// followed by normalize.
PassResult eliminate_null_checks(const plan::MetricsPlan& p, const DatasetSchema& schema);

struct PipelineStage {
  PassReport report;
  plan::MetricsPlan after;
};

struct PipelineResult {
  plan::MetricsPlan plan;
  std::vector<PipelineStage> stages;  // in pipeline order
};

/// normalize -> enrich_variance -> enrich_segments -> prune -> CSE ->
/// null-check -> normalize. Running it on its own output is a no-op.
PipelineResult run_pipeline(const plan::MetricsPlan& p, const AnalysisConfig& cfg);

}  // namespace metriq::transforms
