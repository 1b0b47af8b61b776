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

#include "metriq/engine/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "metriq/error.hpp"
#include "metriq/hash.hpp"

namespace metriq {

namespace {

const std::set<std::string> kTopKeys = {"dataset",           "mode",    "assignment", "randomization_unit",
                                        "metric_groups",     "metrics", "segments",   "fabric",
                                        "output",            "max_segment_cardinality"};

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error(ErrorCode::Config, "unknown key '" + k + "' in " + where);
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace

void AnalysisConfig::validate() const {
  if (mode == Mode::Experiment) {
    if (assignment_column.empty()) throw Error(ErrorCode::Config, "experiment mode requires assignment.column");
    if (randomization_unit.empty()) throw Error(ErrorCode::Config, "experiment mode requires randomization_unit");
    if (treatment == control)
      throw Error(ErrorCode::Config, "treatment and control labels must differ (both '" + treatment + "')");
  }
  if (!segments.include_overall && segments.segments.empty() && segments.combine.empty())
    throw Error(ErrorCode::Config, "segments: include_overall is false and no segments are requested");
  for (const auto& tuple : segments.combine)
    if (tuple.size() < 2) throw Error(ErrorCode::Config, "segments.combine entries need at least 2 segments");
  if (max_segment_cardinality == 0) throw Error(ErrorCode::Config, "max_segment_cardinality must be positive");
  if (table.empty()) throw Error(ErrorCode::Config, "dataset.table must not be empty");
}

std::uint64_t AnalysisConfig::digest() const { return Hasher().str(config_to_json(*this).dump()).digest(); }

AnalysisConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  reject_unknown(j, kTopKeys, "config");
  AnalysisConfig cfg;
  try {
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      reject_unknown(d, {"manifest", "table"}, "dataset");
      cfg.manifest = resolve(base_dir, d.value("manifest", std::string{}));
      cfg.table = d.value("table", cfg.table);
    }
    std::string mode = j.value("mode", std::string("experiment"));
    if (mode == "experiment")
      cfg.mode = Mode::Experiment;
    else if (mode == "business")
      cfg.mode = Mode::Business;
    else
      throw Error(ErrorCode::Config, "mode must be 'experiment' or 'business', found '" + mode + "'");
    if (j.contains("assignment")) {
      const auto& a = j["assignment"];
      reject_unknown(a, {"column", "treatment", "control"}, "assignment");
      cfg.assignment_column = a.value("column", std::string{});
      cfg.treatment = a.value("treatment", cfg.treatment);
      cfg.control = a.value("control", cfg.control);
    }
    cfg.randomization_unit = j.value("randomization_unit", std::string{});
    if (j.contains("metric_groups")) cfg.metric_groups = j["metric_groups"].get<std::vector<std::string>>();
    if (j.contains("metrics")) cfg.metrics = j["metrics"].get<std::vector<std::string>>();
    if (j.contains("segments")) {
      const auto& s = j["segments"];
      reject_unknown(s, {"segments", "combine", "include_overall"}, "segments");
      cfg.segments.segments = s.value("segments", std::vector<std::string>{});
      cfg.segments.combine = s.value("combine", std::vector<std::vector<std::string>>{});
      cfg.segments.include_overall = s.value("include_overall", true);
    }
    cfg.fabric = j.value("fabric", cfg.fabric);
    cfg.output = resolve(base_dir, j.value("output", std::string{}));
    if (j.contains("max_segment_cardinality"))
      cfg.max_segment_cardinality = j["max_segment_cardinality"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

nlohmann::json config_to_json(const AnalysisConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"manifest", cfg.manifest}, {"table", cfg.table}};
  j["mode"] = cfg.mode == Mode::Experiment ? "experiment" : "business";
  j["assignment"] = {{"column", cfg.assignment_column}, {"treatment", cfg.treatment}, {"control", cfg.control}};
  j["randomization_unit"] = cfg.randomization_unit;
  if (cfg.metric_groups) j["metric_groups"] = *cfg.metric_groups;
  if (cfg.metrics) j["metrics"] = *cfg.metrics;
  j["segments"] = {{"segments", cfg.segments.segments},
                   {"combine", cfg.segments.combine},
                   {"include_overall", cfg.segments.include_overall}};
  j["fabric"] = cfg.fabric;
  j["output"] = cfg.output;
  j["max_segment_cardinality"] = cfg.max_segment_cardinality;
  return j;
}

std::vector<std::string> resolve_requested_metrics(const mdl::MetricSet& ms, const AnalysisConfig& cfg) {
  std::set<std::string> wanted;
  if (!cfg.metric_groups && !cfg.metrics) {
    for (const auto& m : ms.metrics) wanted.insert(m.name);
  } else {
    for (const auto& g : cfg.metric_groups.value_or(std::vector<std::string>{})) {
      const mdl::MetricGroup* group = ms.find_group(g);
      if (!group) {
        std::string known;
        for (const auto& x : ms.groups) known += (known.empty() ? "" : ", ") + x.name;
        throw Error(ErrorCode::UnknownGroup,
                    "unknown metric group '" + g + "' (known groups: " + (known.empty() ? "none" : known) + ")");
      }
      wanted.insert(group->members.begin(), group->members.end());
    }
    for (const auto& m : cfg.metrics.value_or(std::vector<std::string>{})) {
      if (!ms.find_metric(m)) throw Error(ErrorCode::UnknownMetric, "metric '" + m + "' is not in the metric set");
      wanted.insert(m);
    }
  }
  std::vector<std::string> out;
  for (const auto& m : ms.metrics)
    if (wanted.count(m.name)) out.push_back(m.name);
  if (out.empty()) throw Error(ErrorCode::EmptyRequest, "no metrics requested");
  return out;
}

void check_segment_spec(const mdl::MetricSet& ms, const SegmentSpec& spec) {
  auto check = [&](const std::string& s) {
    if (!ms.find_segment(s)) throw Error(ErrorCode::Config, "unknown segment '" + s + "'");
  };
  for (const auto& s : spec.segments) check(s);
  for (const auto& tuple : spec.combine) {
    if (tuple.size() < 2) throw Error(ErrorCode::Config, "segments.combine entries need at least 2 segments");
    std::set<std::string> distinct(tuple.begin(), tuple.end());
    if (distinct.size() != tuple.size()) throw Error(ErrorCode::Config, "segments.combine entry repeats a segment");
    for (const auto& s : tuple) check(s);
  }
}

}  // namespace metriq
