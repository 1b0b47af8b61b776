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

#include "metriq/plan/plan.hpp"

#include <algorithm>
#include <bit>
#include <queue>

#include "metriq/error.hpp"
#include "metriq/hash.hpp"

namespace metriq::plan {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Column: return "Column";
    case Op::Literal: return "Literal";
    case Op::Unary: return "Unary";
    case Op::Binary: return "Binary";
    case Op::Conditional: return "Conditional";
    case Op::IsNull: return "IsNull";
    case Op::Coalesce: return "Coalesce";
    case Op::Aggregation: return "Aggregation";
    case Op::GroupedAggregation: return "GroupedAggregation";
  }
  return "?";
}

std::string AggLevel::to_string() const {
  switch (tag) {
    case Tag::Row: return "Row";
    case Tag::Unit: return "Unit(" + unit + ")";
    case Tag::Population: return "Population";
  }
  return "?";
}

std::optional<NodeId> PlanNode::arg(std::size_t i) const {
  if (i >= arg_count) return std::nullopt;
  return children[i];
}

std::optional<NodeId> PlanNode::filter() const {
  if (!has_filter) return std::nullopt;
  return children[arg_count];
}

std::vector<NodeId> PlanNode::keys() const {
  if (op != Op::GroupedAggregation) return {};
  std::size_t first = arg_count + (has_filter ? 1 : 0);
  return {children.begin() + static_cast<std::ptrdiff_t>(first), children.end()};
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Standard: return "Standard";
    case Estimator::DeltaRatio: return "DeltaRatio";
    case Estimator::Unsupported: return "Unsupported";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Value: return "value";
    case Role::N: return "n";
    case Role::SumV: return "sum_v";
    case Role::SumV2: return "sum_v2";
    case Role::SumY: return "sum_y";
    case Role::SumX: return "sum_x";
    case Role::SumY2: return "sum_y2";
    case Role::SumX2: return "sum_x2";
    case Role::SumXY: return "sum_xy";
  }
  return "?";
}

namespace {

void hash_value(Hasher& h, const Value& v) {
  h.u64(static_cast<std::uint64_t>(v.type()));
  switch (v.type()) {
    case ValueType::Null: break;
    case ValueType::Bool: h.u64(v.as_bool()); break;
    case ValueType::Number: h.f64(v.as_number()); break;
    case ValueType::String: h.str(v.as_string()); break;
  }
}

std::string value_key(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return "n";
    case ValueType::Bool: return v.as_bool() ? "t" : "f";
    case ValueType::Number: return "d" + std::to_string(std::bit_cast<std::uint64_t>(v.as_number()));
    case ValueType::String: return "s" + v.as_string();
  }
  return {};
}

}  // namespace

void MetricsPlan::fill(PlanNode& n) const {
  for (NodeId c : n.children)
    if (c >= nodes_.size()) throw Error(ErrorCode::Internal, "plan node refers to missing child " + std::to_string(c));
  auto child = [&](std::size_t i) -> const PlanNode& { return nodes_[n.children[i]]; };

  switch (n.op) {
    case Op::Column: {
      const ColumnSchema* col = schema.find(n.column);
      n.type = col ? std::optional(col->type) : std::nullopt;
      n.nullable = col ? col->nullable : true;
      break;
    }
    case Op::Literal:
      n.type = n.literal.type();
      n.nullable = n.literal.is_null();
      break;
    case Op::Unary:
      n.type = n.unary == UnaryOp::Neg ? ValueType::Number : ValueType::Bool;
      n.nullable = child(0).nullable;
      break;
    case Op::Binary:
      n.type = is_arithmetic(n.binary) ? ValueType::Number : ValueType::Bool;
      n.nullable = child(0).nullable || child(1).nullable || n.binary == BinaryOp::Div;
      break;
    case Op::Conditional: {
      const PlanNode& t = child(1);
      const PlanNode& e = child(2);
      n.type = (t.type && *t.type != ValueType::Null) ? t.type : e.type;
      n.nullable = t.nullable || e.nullable;
      break;
    }
    case Op::IsNull:
      n.type = ValueType::Bool;
      n.nullable = false;
      break;
    case Op::Coalesce: {
      const PlanNode& a = child(0);
      const PlanNode& b = child(1);
      n.type = (a.type && *a.type != ValueType::Null) ? a.type : b.type;
      n.nullable = a.nullable && b.nullable;
      break;
    }
    case Op::Aggregation:
    case Op::GroupedAggregation:
      n.type = ValueType::Number;
      n.nullable = !(n.agg == AggKind::Sum || n.agg == AggKind::Count || n.agg == AggKind::SumProduct);
      break;
  }

  Hasher h;
  h.u64(static_cast<std::uint64_t>(n.op)).u64(static_cast<std::uint64_t>(n.level.tag)).str(n.level.unit);
  switch (n.op) {
    case Op::Column: h.str(n.column); break;
    case Op::Literal: hash_value(h, n.literal); break;
    case Op::Unary: h.u64(static_cast<std::uint64_t>(n.unary)); break;
    case Op::Binary: h.u64(static_cast<std::uint64_t>(n.binary)); break;
    case Op::Aggregation:
    case Op::GroupedAggregation:
      h.u64(static_cast<std::uint64_t>(n.agg)).u64(n.arg_count).u64(n.has_filter);
      h.u64(n.rank.has_value()).f64(n.rank.value_or(0));
      break;
    default: break;
  }
  h.u64(n.children.size());
  for (NodeId c : n.children) h.u64(nodes_[c].hash);
  n.hash = h.digest();
}

std::string MetricsPlan::key_of(const PlanNode& n) const {
  std::string k = std::to_string(static_cast<int>(n.op)) + "|" + n.level.to_string() + "|";
  switch (n.op) {
    case Op::Column: k += n.column; break;
    case Op::Literal: k += value_key(n.literal); break;
    case Op::Unary: k += std::to_string(static_cast<int>(n.unary)); break;
    case Op::Binary: k += std::to_string(static_cast<int>(n.binary)); break;
    case Op::Aggregation:
    case Op::GroupedAggregation:
      k += std::to_string(static_cast<int>(n.agg)) + "," + std::to_string(n.arg_count) + "," +
           (n.has_filter ? "f" : "-") + "," + (n.rank ? value_key(Value::number(*n.rank)) : "-");
      break;
    default: break;
  }
  for (NodeId c : n.children) k += "|" + std::to_string(c);
  return k;
}

NodeId MetricsPlan::intern(PlanNode n) {
  fill(n);
  std::string key = key_of(n);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  index_.emplace(std::move(key), id);
  return id;
}

NodeId MetricsPlan::append_raw(PlanNode n) {
  fill(n);
  auto id = static_cast<NodeId>(nodes_.size());
  index_.try_emplace(key_of(n), id);
  nodes_.push_back(std::move(n));
  return id;
}

NodeId MetricsPlan::column(const std::string& name) {
  PlanNode n;
  n.op = Op::Column;
  n.column = name;
  return intern(std::move(n));
}

NodeId MetricsPlan::literal(Value v) {
  PlanNode n;
  n.op = Op::Literal;
  n.literal = std::move(v);
  return intern(std::move(n));
}

NodeId MetricsPlan::unary(UnaryOp op, NodeId operand) {
  PlanNode n;
  n.op = Op::Unary;
  n.unary = op;
  n.children = {operand};
  return intern(std::move(n));
}

NodeId MetricsPlan::binary(BinaryOp op, NodeId lhs, NodeId rhs) {
  PlanNode n;
  n.op = Op::Binary;
  n.binary = op;
  n.children = {lhs, rhs};
  return intern(std::move(n));
}

NodeId MetricsPlan::conditional(NodeId c, NodeId t, NodeId e) {
  PlanNode n;
  n.op = Op::Conditional;
  n.children = {c, t, e};
  return intern(std::move(n));
}

NodeId MetricsPlan::is_null(NodeId operand) {
  PlanNode n;
  n.op = Op::IsNull;
  n.children = {operand};
  return intern(std::move(n));
}

NodeId MetricsPlan::coalesce(NodeId value, NodeId fallback) {
  PlanNode n;
  n.op = Op::Coalesce;
  n.children = {value, fallback};
  return intern(std::move(n));
}

NodeId MetricsPlan::aggregation(AggKind kind, AggLevel level, std::vector<NodeId> args, std::optional<NodeId> filter,
                                std::optional<double> rank) {
  PlanNode n;
  n.op = Op::Aggregation;
  n.agg = kind;
  n.level = std::move(level);
  n.rank = rank;
  n.arg_count = static_cast<std::uint8_t>(args.size());
  n.children = std::move(args);
  if (filter) {
    n.has_filter = true;
    n.children.push_back(*filter);
  }
  return intern(std::move(n));
}

NodeId MetricsPlan::grouped(AggKind kind, AggLevel level, std::vector<NodeId> args, std::optional<NodeId> filter,
                            std::vector<NodeId> keys, std::optional<double> rank) {
  PlanNode n;
  n.op = Op::GroupedAggregation;
  n.agg = kind;
  n.level = std::move(level);
  n.rank = rank;
  n.arg_count = static_cast<std::uint8_t>(args.size());
  n.children = std::move(args);
  if (filter) {
    n.has_filter = true;
    n.children.push_back(*filter);
  }
  n.children.insert(n.children.end(), keys.begin(), keys.end());
  return intern(std::move(n));
}

bool MetricsPlan::finalized() const {
  if (roots.empty()) return false;
  for (const auto& [key, id] : roots)
    if (key.slice.empty() || node(id).op != Op::GroupedAggregation) return false;
  return true;
}

std::uint64_t MetricsPlan::digest() const {
  Hasher h;
  for (const auto& [key, id] : roots)
    h.str(key.metric).str(key.slice).u64(static_cast<std::uint64_t>(key.role)).u64(node(id).hash);
  for (const auto& [m, e] : estimators) h.str(m).u64(static_cast<std::uint64_t>(e));
  for (const auto& [name, id] : segment_nodes) h.str(name).u64(node(id).hash);
  for (const auto& s : slice_sets) h.str(s.id);
  if (assignment) h.str(assignment->column).str(assignment->treatment).str(assignment->control);
  h.str(randomization_unit).u64(config_digest);
  return h.digest();
}

std::vector<bool> MetricsPlan::reachable() const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack;
  for (const auto& [k, id] : roots) stack.push_back(id);
  for (const auto& [k, id] : segment_nodes) stack.push_back(id);
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (id >= nodes_.size()) throw Error(ErrorCode::Internal, "root refers to missing node " + std::to_string(id));
    if (seen[id]) continue;
    seen[id] = true;
    for (NodeId c : nodes_[id].children) stack.push_back(c);
  }
  return seen;
}

std::vector<NodeId> topo_order(const MetricsPlan& p) { return topo_order(p.nodes()); }

std::vector<NodeId> topo_order(const std::vector<PlanNode>& nodes) {
  std::size_t n = nodes.size();
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<NodeId>> parents(n);
  for (NodeId id = 0; id < n; ++id) {
    for (NodeId c : nodes[id].children) {
      if (c >= n) throw Error(ErrorCode::Internal, "node " + std::to_string(id) + " refers to missing child");
      ++pending[id];
      parents[c].push_back(id);
    }
  }
  auto later = [&](NodeId a, NodeId b) {
    if (nodes[a].hash != nodes[b].hash) return nodes[a].hash > nodes[b].hash;
    return a > b;
  };
  std::priority_queue<NodeId, std::vector<NodeId>, decltype(later)> ready(later);
  for (NodeId id = 0; id < n; ++id)
    if (pending[id] == 0) ready.push(id);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (NodeId parent : parents[id])
      if (--pending[parent] == 0) ready.push(parent);
  }
  if (order.size() != n)
    throw Error(ErrorCode::CycleDetected, "cycle detected in metrics plan: " + std::to_string(n - order.size()) +
                                              " nodes are on or behind a cycle");
  return order;
}

void verify(const MetricsPlan& p) {
  topo_order(p);
  for (const auto& [key, id] : p.roots)
    if (id >= p.size()) throw Error(ErrorCode::Internal, "root '" + key.metric + "' refers to a missing node");
  for (NodeId id = 0; id < p.size(); ++id) {
    const PlanNode& n = p.node(id);
    if (!n.is_aggregation()) {
      for (NodeId c : n.children)
        if (!p.node(c).level.is_row())
          throw Error(ErrorCode::Internal, "row expression " + std::to_string(id) + " has an aggregated child");
      continue;
    }
    for (std::size_t i = 0; i < n.arg_count; ++i) {
      const AggLevel& child = p.node(n.children[i]).level;
      if (n.level.tag == AggLevel::Tag::Unit && !child.is_row())
        throw Error(ErrorCode::Internal, "unit-level aggregation " + std::to_string(id) + " over non-row values");
      if (n.level.tag == AggLevel::Tag::Population && child.tag == AggLevel::Tag::Population)
        throw Error(ErrorCode::Internal, "population aggregation " + std::to_string(id) + " over population values");
    }
    for (NodeId k : n.keys())
      if (!p.node(k).level.is_row())
        throw Error(ErrorCode::Internal, "group key of node " + std::to_string(id) + " is not row-level");
    if (auto f = n.filter(); f && !p.node(*f).level.is_row())
      throw Error(ErrorCode::Internal, "filter of node " + std::to_string(id) + " is not row-level");
  }
}

}  // namespace metriq::plan
