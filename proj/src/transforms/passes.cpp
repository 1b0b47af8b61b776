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

#include "metriq/transforms/passes.hpp"

#include <algorithm>
#include <set>

#include "metriq/error.hpp"
#include "metriq/plan/build.hpp"

namespace metriq::transforms {

using plan::AggLevel;
using plan::Estimator;
using plan::MetricsPlan;
using plan::NodeId;
using plan::Op;
using plan::PlanNode;
using plan::Role;
using plan::RootKey;

nlohmann::json PassReport::to_json() const {
  nlohmann::json est = nlohmann::json::object();
  for (const auto& [m, e] : estimators) est[m] = std::string(plan::to_string(e));
  nlohmann::json j = {{"pass", pass},       {"nodes_before", nodes_before}, {"nodes_after", nodes_after},
                      {"added", added},     {"removed", removed},           {"estimators", est},
                      {"skipped", skipped}};
  if (!note.empty()) j["note"] = note;
  return j;
}

namespace {

PassReport make_report(std::string name, const MetricsPlan& before, const MetricsPlan& after) {
  PassReport r;
  r.pass = std::move(name);
  r.nodes_before = before.size();
  r.nodes_after = after.size();
  std::multiset<std::uint64_t> a, b;
  for (const auto& n : before.nodes()) a.insert(n.hash);
  for (const auto& n : after.nodes()) b.insert(n.hash);
  for (auto h : b) {
    auto it = a.find(h);
    if (it == a.end())
      ++r.added;
    else
      a.erase(it);
  }
  r.removed = a.size();
  r.estimators = after.estimators;
  return r;
}

bool is_sliced(const MetricsPlan& p) {
  return std::any_of(p.roots.begin(), p.roots.end(), [](const auto& kv) { return !kv.first.slice.empty(); });
}

}  // namespace

Estimator select_variance_estimator(const MetricsPlan& p, NodeId metric_root, const std::string& randomization_unit) {
  if (!p.schema.units.count(randomization_unit))
    throw Error(ErrorCode::UnknownUnit, "randomization unit '" + randomization_unit + "' is not a declared unit");
  const PlanNode& root = p.node(metric_root);
  if (!root.is_aggregation() || root.level.tag != AggLevel::Tag::Population)
    throw Error(ErrorCode::Internal, "metric root is not a population-level aggregation");
  if (root.agg != AggKind::Avg) return Estimator::Unsupported;
  auto arg = root.arg();
  if (!arg) return Estimator::Unsupported;
  const PlanNode& inner = p.node(*arg);
  if (inner.level.is_row()) return Estimator::DeltaRatio;
  if (inner.level.tag == AggLevel::Tag::Unit && inner.level.unit == randomization_unit) return Estimator::Standard;
  return Estimator::Unsupported;
}

PassResult normalize_pass(const MetricsPlan& p) {
  MetricsPlan out = plan::normalize(p);
  PassReport r = make_report("normalize", p, out);
  plan::verify(out);
  return {std::move(out), std::move(r)};
}

PassResult enrich_variance(const MetricsPlan& p, const AnalysisConfig& cfg) {
  if (cfg.mode == Mode::Business) {
    PassReport r = make_report("enrich_variance", p, p);
    r.skipped = true;
    r.note = "business mode";
    return {p, std::move(r)};
  }
  MetricsPlan out = p;
  std::size_t enriched = 0;
  const std::string& ru = cfg.randomization_unit;
  std::vector<std::pair<std::string, NodeId>> targets;
  for (const auto& [key, id] : p.roots)
    if (key.slice.empty() && key.role == Role::Value && !p.estimators.count(key.metric))
      targets.emplace_back(key.metric, id);
  for (const auto& [metric, id] : targets) {
    Estimator e = select_variance_estimator(out, id, ru);
    out.estimators[metric] = e;
    auto root = [&](Role role, NodeId n) { out.roots[{metric, plan::kUnslicedId, role}] = n; };
    const PlanNode node = out.node(id);
    if (e == Estimator::Standard) {
      NodeId u = *node.arg();
      root(Role::N, out.aggregation(AggKind::Count, AggLevel::population(), {u}, std::nullopt));
      root(Role::SumV, out.aggregation(AggKind::Sum, AggLevel::population(), {u}, std::nullopt));
      root(Role::SumV2, out.aggregation(AggKind::SumProduct, AggLevel::population(), {u, u}, std::nullopt));
      ++enriched;
    } else if (e == Estimator::DeltaRatio) {
      NodeId a = *node.arg();
      auto f = node.filter();
      NodeId y = out.aggregation(AggKind::Sum, AggLevel::of_unit(ru), {a}, f);
      NodeId x = out.aggregation(AggKind::Count, AggLevel::of_unit(ru), {a}, f);
      auto pop = [&](AggKind k, std::vector<NodeId> args) {
        return out.aggregation(k, AggLevel::population(), std::move(args), std::nullopt);
      };
      root(Role::N, pop(AggKind::Count, {y}));
      root(Role::SumY, pop(AggKind::Sum, {y}));
      root(Role::SumX, pop(AggKind::Sum, {x}));
      root(Role::SumY2, pop(AggKind::SumProduct, {y, y}));
      root(Role::SumX2, pop(AggKind::SumProduct, {x, x}));
      root(Role::SumXY, pop(AggKind::SumProduct, {y, x}));
      ++enriched;
    }
  }
  out = plan::compact(out);
  plan::verify(out);
  PassReport r = make_report("enrich_variance", p, out);
  r.note = std::to_string(enriched) + " metrics enriched";
  return {std::move(out), std::move(r)};
}

PassResult enrich_segments(const MetricsPlan& p, const SegmentSpec& spec) {
  if (is_sliced(p)) {
    PassReport r = make_report("enrich_segments", p, p);
    r.skipped = true;
    r.note = "already segmented";
    return {p, std::move(r)};
  }
  MetricsPlan out = p;
  std::vector<plan::SliceSet> sets;
  auto add_set = [&](const std::vector<std::string>& segs) {
    std::string id;
    for (const auto& s : segs) id += (id.empty() ? "" : ",") + s;
    for (const auto& existing : sets)
      if (existing.id == id) return;
    sets.push_back({id, segs});
  };
  if (spec.include_overall) sets.push_back({plan::kOverallId, {}});
  for (const auto& s : spec.segments) add_set({s});
  for (const auto& t : spec.combine) {
    if (t.size() < 2) throw Error(ErrorCode::Config, "segments.combine entries need at least 2 segments");
    add_set(t);
  }
  if (sets.empty()) throw Error(ErrorCode::Config, "no slices requested");

  for (const auto& set : sets) {
    for (const auto& s : set.segments) {
      auto it = out.segment_nodes.find(s);
      if (it == out.segment_nodes.end()) throw Error(ErrorCode::Config, "unknown segment '" + s + "'");
      if (!out.node(it->second).level.is_row())
        throw Error(ErrorCode::Type, "segment '" + s + "' contains an aggregation");
    }
  }

  std::vector<std::pair<RootKey, NodeId>> unsliced(p.roots.begin(), p.roots.end());
  out.roots.clear();
  for (const auto& set : sets) {
    std::vector<NodeId> slice_keys;
    if (out.assignment) slice_keys.push_back(out.column(out.assignment->column));
    for (const auto& s : set.segments) slice_keys.push_back(out.segment_nodes.at(s));

    std::map<NodeId, NodeId> memo;
    std::function<NodeId(NodeId)> copy = [&](NodeId id) -> NodeId {
      if (auto it = memo.find(id); it != memo.end()) return it->second;
      PlanNode n = out.node(id);
      NodeId result = id;
      if (n.op == Op::Aggregation) {
        std::vector<NodeId> args;
        for (std::size_t i = 0; i < n.arg_count; ++i) args.push_back(copy(n.children[i]));
        std::vector<NodeId> keys;
        if (n.level.tag == AggLevel::Tag::Unit) {
          auto unit = out.schema.units.find(n.level.unit);
          if (unit == out.schema.units.end())
            throw Error(ErrorCode::UnknownUnit, "unit '" + n.level.unit + "' is not declared");
          keys.push_back(out.column(unit->second));
        }
        keys.insert(keys.end(), slice_keys.begin(), slice_keys.end());
        result = out.grouped(n.agg, n.level, std::move(args), n.filter(), std::move(keys), n.rank);
      } else if (n.op == Op::GroupedAggregation) {
        throw Error(ErrorCode::Internal, "unsliced root already contains a grouped aggregation");
      }
      memo[id] = result;
      return result;
    };
    for (const auto& [key, id] : unsliced) out.roots[{key.metric, set.id, key.role}] = copy(id);
  }
  out.slice_sets = sets;
  out.segment_nodes.clear();
  out = plan::compact(out);
  plan::verify(out);
  PassReport r = make_report("enrich_segments", p, out);
  r.note = std::to_string(sets.size()) + " slice sets";
  return {std::move(out), std::move(r)};
}

PassResult prune_unused(const MetricsPlan& p, const std::vector<std::string>& requested) {
  if (requested.empty()) throw Error(ErrorCode::EmptyRequest, "no metrics requested");
  std::set<std::string> known;
  for (const auto& [key, id] : p.roots) known.insert(key.metric);
  for (const auto& m : requested)
    if (!known.count(m)) throw Error(ErrorCode::UnknownMetric, "requested metric '" + m + "' has no root in the plan");
  std::set<std::string> keep(requested.begin(), requested.end());
  MetricsPlan out = p;
  std::erase_if(out.roots, [&](const auto& kv) { return !keep.count(kv.first.metric); });
  std::erase_if(out.estimators, [&](const auto& kv) { return !keep.count(kv.first); });
  std::erase_if(out.requested, [&](const std::string& m) { return !keep.count(m); });
  out = plan::compact(out);
  PassReport r = make_report("prune_unused", p, out);
  return {std::move(out), std::move(r)};
}

PassResult dedup_common_subexpressions(const MetricsPlan& p) {
  MetricsPlan out = plan::compact(p);
  PassReport r = make_report("dedup_common_subexpressions", p, out);
  return {std::move(out), std::move(r)};
}

PassResult eliminate_null_checks(const MetricsPlan& p, const DatasetSchema& schema) {
  auto non_nullable_column = [&](const MetricsPlan& m, NodeId id) {
    const PlanNode& n = m.node(id);
    if (n.op != Op::Column) return false;
    const ColumnSchema* col = schema.find(n.column);
    return col && !col->nullable;
  };
  MetricsPlan rewritten = plan::rebuild(p, [&](MetricsPlan& out, PlanNode n) {
    if (n.op == Op::IsNull && non_nullable_column(out, n.children[0])) return out.literal(Value::boolean(false));
    if (n.op == Op::Coalesce && non_nullable_column(out, n.children[0])) return n.children[0];
    return out.intern(std::move(n));
  });
  MetricsPlan out = plan::normalize(rewritten);
  plan::verify(out);
  PassReport r = make_report("eliminate_null_checks", p, out);
  return {std::move(out), std::move(r)};
}

PipelineResult run_pipeline(const MetricsPlan& p, const AnalysisConfig& cfg) {
  PipelineResult result;
  MetricsPlan current = p;
  auto stage = [&](PassResult pr) {
    current = pr.plan;
    result.stages.push_back({std::move(pr.report), std::move(pr.plan)});
  };
  stage(normalize_pass(current));
  stage(enrich_variance(current, cfg));
  stage(enrich_segments(current, cfg.segments));
  stage(prune_unused(current, current.requested));
  stage(dedup_common_subexpressions(current));
  stage(eliminate_null_checks(current, current.schema));
  PassResult last = normalize_pass(current);
  last.report.pass = "normalize_final";
  stage(std::move(last));
  if (!current.finalized()) throw Error(ErrorCode::Internal, "pipeline output is not finalized");
  result.plan = current;
  return result;
}

}  // namespace metriq::transforms
