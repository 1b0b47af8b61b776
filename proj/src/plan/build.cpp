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

#include "metriq/plan/build.hpp"

#include <set>

#include "metriq/error.hpp"

namespace metriq::plan {

namespace {

bool is_null_literal(const mdl::Expr& e) {
  auto* l = e.as<mdl::Literal>();
  return l && l->value.is_null();
}

}  // namespace

NodeId lower(MetricsPlan& p, const mdl::Expr& e) {
  if (auto* c = e.as<mdl::ColumnRef>()) return p.column(c->name);
  if (auto* l = e.as<mdl::Literal>()) return p.literal(l->value);
  if (auto* u = e.as<mdl::Unary>()) return p.unary(u->op, lower(p, *u->operand));
  if (auto* b = e.as<mdl::Binary>()) {
    if (b->op == BinaryOp::Eq || b->op == BinaryOp::Ne) {
      const mdl::Expr* other = nullptr;
      if (is_null_literal(*b->rhs))
        other = b->lhs.get();
      else if (is_null_literal(*b->lhs))
        other = b->rhs.get();
      if (other) {
        NodeId test = p.is_null(lower(p, *other));
        return b->op == BinaryOp::Eq ? test : p.unary(UnaryOp::Not, test);
      }
    }
    NodeId lhs = lower(p, *b->lhs);
    return p.binary(b->op, lhs, lower(p, *b->rhs));
  }
  if (auto* c = e.as<mdl::Conditional>()) {
    NodeId cond = lower(p, *c->cond);
    NodeId then_id = lower(p, *c->then_branch);
    return p.conditional(cond, then_id, lower(p, *c->else_branch));
  }
  const auto& a = *e.as<mdl::Aggregation>();
  std::vector<NodeId> args;
  if (a.arg) args.push_back(lower(p, *a.arg));
  std::optional<NodeId> filter;
  if (a.filter) filter = lower(p, *a.filter);
  AggLevel level = a.level ? AggLevel::of_unit(*a.level) : AggLevel::population();
  return p.aggregation(a.kind, std::move(level), std::move(args), filter, a.rank);
}

MetricsPlan build_plan(const mdl::TypedMetricSet& tms, const AnalysisConfig& cfg) {
  cfg.validate();
  const mdl::MetricSet& ms = *tms.metric_set;
  MetricsPlan p;
  p.schema = tms.schema;
  p.requested = resolve_requested_metrics(ms, cfg);
  check_segment_spec(ms, cfg.segments);

  if (cfg.mode == Mode::Experiment) {
    const ColumnSchema* col = p.schema.find(cfg.assignment_column);
    if (!col) throw Error(ErrorCode::Config, "assignment column '" + cfg.assignment_column + "' is not in the dataset");
    if (col->type != ValueType::String)
      throw Error(ErrorCode::Config, "assignment column '" + cfg.assignment_column + "' must be a string column");
    if (!p.schema.units.count(cfg.randomization_unit))
      throw Error(ErrorCode::UnknownUnit, "randomization unit '" + cfg.randomization_unit + "' is not a declared unit");
    p.assignment = Assignment{cfg.assignment_column, cfg.treatment, cfg.control};
  }
  p.randomization_unit = cfg.randomization_unit;

  for (const auto& name : p.requested) p.roots[{name, kUnslicedId, Role::Value}] = lower(p, *ms.find_metric(name)->expr);

  const SegmentSpec& spec = cfg.segments;
  if (spec.include_overall) p.slice_sets.push_back({kOverallId, {}});
  std::set<std::string> used;
  auto add_set = [&](const std::vector<std::string>& segs) {
    std::string id;
    for (const auto& s : segs) id += (id.empty() ? "" : ",") + s;
    for (const auto& existing : p.slice_sets)
      if (existing.id == id) return;
    p.slice_sets.push_back({id, segs});
    used.insert(segs.begin(), segs.end());
  };
  for (const auto& s : spec.segments) add_set({s});
  for (const auto& tuple : spec.combine) add_set(tuple);
  for (const auto& s : used) p.segment_nodes[s] = lower(p, *ms.find_segment(s)->expr);

  p.config_digest = cfg.digest();
  verify(p);
  return p;
}

MetricsPlan rebuild(const MetricsPlan& p, const RewriteFn& fn) {
  MetricsPlan out;
  out.schema = p.schema;
  out.assignment = p.assignment;
  out.randomization_unit = p.randomization_unit;
  out.requested = p.requested;
  out.slice_sets = p.slice_sets;
  out.estimators = p.estimators;
  out.config_digest = p.config_digest;

  std::vector<std::optional<NodeId>> memo(p.size());
  std::vector<std::uint8_t> state(p.size(), 0);  // 1 = on stack
  std::function<NodeId(NodeId)> visit = [&](NodeId id) -> NodeId {
    if (id >= p.size()) throw Error(ErrorCode::Internal, "rebuild: missing node " + std::to_string(id));
    if (memo[id]) return *memo[id];
    if (state[id] == 1) throw Error(ErrorCode::CycleDetected, "cycle detected at plan node " + std::to_string(id));
    state[id] = 1;
    PlanNode n = p.node(id);
    for (auto& c : n.children) c = visit(c);
    NodeId result = fn(out, std::move(n));
    state[id] = 0;
    memo[id] = result;
    return result;
  };
  for (const auto& [key, id] : p.roots) out.roots[key] = visit(id);
  for (const auto& [name, id] : p.segment_nodes) out.segment_nodes[name] = visit(id);

  // Garbage created by the rewrite is dropped by re-interning what is reachable.
  auto live = out.reachable();
  bool garbage = false;
  for (bool b : live) garbage |= !b;
  return garbage ? compact(out) : out;
}

MetricsPlan compact(const MetricsPlan& p) {
  return rebuild(p, [](MetricsPlan& out, PlanNode n) { return out.intern(std::move(n)); });
}

}  // namespace metriq::plan
