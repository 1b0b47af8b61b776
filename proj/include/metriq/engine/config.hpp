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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/frontend/ast.hpp"

namespace metriq {

enum class Mode : std::uint8_t { Experiment, Business };

struct SegmentSpec {
  std::vector<std::string> segments;
  std::vector<std::vector<std::string>> combine;  // crossed segments, arity >= 2
  bool include_overall = true;
};

/// One analysis task. Paths are stored as resolved against the config file.
struct AnalysisConfig {
  std::string manifest;
  std::string table = "events";
  Mode mode = Mode::Experiment;
  std::string assignment_column;
  std::string treatment = "treatment";
  std::string control = "control";
  std::string randomization_unit;
  std::optional<std::vector<std::string>> metric_groups;
  std::optional<std::vector<std::string>> metrics;
  SegmentSpec segments;
  std::string fabric = "ansi";
  std::string output;
  std::size_t max_segment_cardinality = 1000;

  /// Throws Error(Config) when mode-specific fields are missing or labels clash.
  void validate() const;
  /// Digest of the canonical JSON form.
  std::uint64_t digest() const;
};

AnalysisConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AnalysisConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const AnalysisConfig& cfg);

/// Requested metric names in metric-set order. Both request lists absent
/// means every metric. Throws UnknownGroup, UnknownMetric or EmptyRequest.
std::vector<std::string> resolve_requested_metrics(const mdl::MetricSet& ms, const AnalysisConfig& cfg);

/// Checks segment references against the metric set. Throws Config.
void check_segment_spec(const mdl::MetricSet& ms, const SegmentSpec& spec);

}  // namespace metriq
