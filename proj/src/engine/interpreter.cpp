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

#include "metriq/engine/interpreter.hpp"

#include <algorithm>
#include <map>

#include "metriq/error.hpp"
#include "metriq/stats/stats.hpp"

namespace metriq {

using plan::AggLevel;
using plan::MetricsPlan;
using plan::NodeId;
using plan::Op;
using plan::PlanNode;

std::vector<std::size_t> analysis_rows(const MetricsPlan& p, const Dataset& ds) {
  std::vector<std::size_t> rows;
  if (!p.assignment) {
    rows.resize(ds.row_count);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
  }
  const auto& variant = ds.column(p.assignment->column);
  const auto& unit_key = ds.column(p.schema.units.at(p.randomization_unit));
  std::map<Value, std::string, ValueLess> seen;
  for (std::size_t i = 0; i < ds.row_count; ++i) {
    const Value& v = variant[i];
    if (!v.is_string() || (v.as_string() != p.assignment->treatment && v.as_string() != p.assignment->control))
      continue;
    auto [it, fresh] = seen.emplace(unit_key[i], v.as_string());
    if (!fresh && it->second != v.as_string())
      throw Error(ErrorCode::ContaminatedAssignment, "contaminated assignment: " + p.randomization_unit + " '" +
                                                         to_display(unit_key[i]) + "' appears in both '" +
                                                         it->second + "' and '" + v.as_string() + "'");
    rows.push_back(i);
  }
  return rows;
}

namespace {

struct Group {
  std::vector<Value> a;  // first argument values (or row markers for Count())
  std::vector<Value> b;  // second argument (SumProduct)
};

Value aggregate(const PlanNode& n, const Group& g) {
  switch (n.agg) {
    case AggKind::Count: {
      if (n.arg_count == 0) return Value::number(static_cast<double>(g.a.size()));
      double c = 0;
      for (const auto& v : g.a) c += v.is_null() ? 0 : 1;
      return Value::number(c);
    }
    case AggKind::Sum:
    case AggKind::Avg: {
      stats::CompensatedSum s;
      double c = 0;
      for (const auto& v : g.a)
        if (v.is_number()) {
          s.add(v.as_number());
          c += 1;
        }
      if (n.agg == AggKind::Sum) return Value::number(s.value());
      return c == 0 ? Value::null() : Value::number(s.value() / c);
    }
    case AggKind::Min:
    case AggKind::Max: {
      std::optional<double> best;
      for (const auto& v : g.a) {
        if (!v.is_number()) continue;
        double x = v.as_number();
        if (!best || (n.agg == AggKind::Min ? x < *best : x > *best)) best = x;
      }
      return best ? Value::number(*best) : Value::null();
    }
    case AggKind::Percentile: {
      std::vector<double> xs;
      for (const auto& v : g.a)
        if (v.is_number()) xs.push_back(v.as_number());
      if (xs.empty()) return Value::null();
      std::sort(xs.begin(), xs.end());
      return Value::number(stats::percentile_nearest_rank(xs, *n.rank));
    }
    case AggKind::SumProduct: {
      stats::CompensatedSum s;
      for (std::size_t i = 0; i < g.a.size(); ++i)
        if (g.a[i].is_number() && g.b[i].is_number()) s.add(g.a[i].as_number() * g.b[i].as_number());
      return Value::number(s.value());
    }
  }
  return Value::null();
}

class Interpreter {
 public:
  Interpreter(const MetricsPlan& p, const Dataset& ds) : p_(p), ds_(ds), rows_(analysis_rows(p, ds)) {}

  const std::vector<Value>& row_values(NodeId id) {
    if (auto it = row_memo_.find(id); it != row_memo_.end()) return it->second;
    const PlanNode& n = p_.node(id);
    std::size_t count = rows_.size();
    std::vector<Value> out(count);
    switch (n.op) {
      case Op::Column: {
        if (ds_.schema.index_of(n.column) == std::string::npos)
          throw Error(ErrorCode::DataLoad, "dataset has no column '" + n.column + "'");
        const auto& col = ds_.column(n.column);
        for (std::size_t i = 0; i < count; ++i) out[i] = col[rows_[i]];
        break;
      }
      case Op::Literal: std::fill(out.begin(), out.end(), n.literal); break;
      case Op::Unary: {
        const auto& a = row_values(n.children[0]);
        for (std::size_t i = 0; i < count; ++i) out[i] = apply_unary(n.unary, a[i]);
        break;
      }
      case Op::Binary: {
        const auto& a = row_values(n.children[0]);
        const auto& b = row_values(n.children[1]);
        for (std::size_t i = 0; i < count; ++i) out[i] = apply_binary(n.binary, a[i], b[i]);
        break;
      }
      case Op::Conditional: {
        const auto& c = row_values(n.children[0]);
        const auto& t = row_values(n.children[1]);
        const auto& e = row_values(n.children[2]);
        for (std::size_t i = 0; i < count; ++i) out[i] = is_true(c[i]) ? t[i] : e[i];
        break;
      }
      case Op::IsNull: {
        const auto& a = row_values(n.children[0]);
        for (std::size_t i = 0; i < count; ++i) out[i] = Value::boolean(a[i].is_null());
        break;
      }
      case Op::Coalesce: {
        const auto& a = row_values(n.children[0]);
        const auto& b = row_values(n.children[1]);
        for (std::size_t i = 0; i < count; ++i) out[i] = a[i].is_null() ? b[i] : a[i];
        break;
      }
      default: throw Error(ErrorCode::Internal, "aggregation used as a row expression");
    }
    return row_memo_.emplace(id, std::move(out)).first->second;
  }

  std::vector<NodeId> group_keys(const PlanNode& n) {
    if (n.op == Op::GroupedAggregation) return n.keys();
    if (n.level.tag == AggLevel::Tag::Unit) return {unit_key_column(n.level.unit)};
    return {};
  }

  const GroupValues& table(NodeId id) {
    if (auto it = agg_memo_.find(id); it != agg_memo_.end()) return it->second;
    const PlanNode& n = p_.node(id);
    if (!n.is_aggregation()) throw Error(ErrorCode::Internal, "root is not an aggregation");
    std::vector<NodeId> keys = group_keys(n);
    std::map<std::vector<Value>, Group, KeyLess> groups;
    if (keys.empty()) groups[{}];

    bool over_units = n.arg_count > 0 && p_.node(n.children[0]).is_aggregation();
    if (!over_units) {
      std::vector<const std::vector<Value>*> key_cols;
      for (NodeId k : keys) key_cols.push_back(&row_values(k));
      const std::vector<Value>* arg0 = n.arg_count > 0 ? &row_values(n.children[0]) : nullptr;
      const std::vector<Value>* arg1 = n.arg_count > 1 ? &row_values(n.children[1]) : nullptr;
      const std::vector<Value>* filter = n.has_filter ? &row_values(*n.filter()) : nullptr;
      std::vector<Value> key(keys.size());
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (std::size_t k = 0; k < keys.size(); ++k) key[k] = (*key_cols[k])[r];
        Group& g = groups[key];
        if (filter && !is_true((*filter)[r])) continue;
        g.a.push_back(arg0 ? (*arg0)[r] : Value::boolean(true));
        if (arg1) g.b.push_back((*arg1)[r]);
      }
    } else {
      const GroupValues& inner = table(n.children[0]);
      const GroupValues* second = n.arg_count > 1 ? &table(n.children[1]) : nullptr;
      check_nesting(n, id);
      for (const auto& [inner_key, v] : inner) {
        std::vector<Value> key(inner_key.begin() + 1, inner_key.end());
        Group& g = groups[key];
        g.a.push_back(v);
        if (second) {
          auto it = second->find(inner_key);
          g.b.push_back(it == second->end() ? Value::null() : it->second);
        }
      }
    }
    GroupValues result;
    for (const auto& [key, g] : groups) result.emplace(key, aggregate(n, g));
    return agg_memo_.emplace(id, std::move(result)).first->second;
  }

 private:
  NodeId unit_key_column(const std::string& unit) {
    auto it = p_.schema.units.find(unit);
    if (it == p_.schema.units.end()) throw Error(ErrorCode::UnknownUnit, "unit '" + unit + "' is not declared");
    auto& cache = unit_columns_[unit];
    if (!cache) {
      auto idx = ds_.schema.index_of(it->second);
      if (idx == std::string::npos) throw Error(ErrorCode::DataLoad, "dataset has no column '" + it->second + "'");
      std::vector<Value> vals(rows_.size());
      for (std::size_t i = 0; i < rows_.size(); ++i) vals[i] = ds_.columns[idx][rows_[i]];
      // synthetic id outside the node range
      cache = static_cast<NodeId>(p_.size() + unit_columns_.size());
      row_memo_[*cache] = std::move(vals);
    }
    return *cache;
  }

  // Population over unit values: inner keys must be [unit key] + outer keys.
  void check_nesting(const PlanNode& n, NodeId id) {
    for (std::size_t i = 0; i < n.arg_count; ++i) {
      const PlanNode& inner = p_.node(n.children[i]);
      if (n.op != inner.op)
        throw Error(ErrorCode::Internal, "node " + std::to_string(id) + " mixes grouped and ungrouped aggregations");
      if (n.op == Op::GroupedAggregation) {
        auto outer_keys = n.keys();
        auto inner_keys = inner.keys();
        if (inner_keys.size() != outer_keys.size() + 1 ||
            !std::equal(outer_keys.begin(), outer_keys.end(), inner_keys.begin() + 1))
          throw Error(ErrorCode::Internal, "node " + std::to_string(id) + " has keys inconsistent with its argument");
      }
    }
  }

  const MetricsPlan& p_;
  const Dataset& ds_;
  std::vector<std::size_t> rows_;
  std::map<NodeId, std::vector<Value>> row_memo_;
  std::map<NodeId, GroupValues> agg_memo_;
  std::map<std::string, std::optional<NodeId>> unit_columns_;
};

}  // namespace

std::vector<Value> evaluate_rows(const MetricsPlan& p, NodeId id, const Dataset& ds) {
  Interpreter interp(p, ds);
  return interp.row_values(id);
}

RootValues evaluate_plan(const MetricsPlan& p, const Dataset& ds) {
  Interpreter interp(p, ds);
  RootValues out;
  for (const auto& [key, id] : p.roots) out[key] = interp.table(id);
  return out;
}

Scorecard execute_plan(const MetricsPlan& p, const Dataset& ds, const AssemblyOptions& opts) {
  if (!p.finalized())
    throw Error(ErrorCode::PlanNotFinalized, "plan is not finalized: run the pass pipeline before execution");
  return assemble_scorecard(p, evaluate_plan(p, ds), opts);
}

}  // namespace metriq
