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

#include "metriq/frontend/type_check.hpp"

#include <map>

namespace metriq::mdl {

namespace {

bool is_null_literal(const Expr& e) {
  auto* l = e.as<Literal>();
  return l && l->value.is_null();
}

// Unknown and null types are compatible with anything.
bool compatible(const ExprType& t, ValueType want) {
  return !t.type || *t.type == want || *t.type == ValueType::Null;
}

std::string column_note(const Expr& e) {
  auto* c = e.as<ColumnRef>();
  return c ? " column '" + c->name + "'" : "";
}

std::string type_name(const ExprType& t) { return t.type ? std::string(to_string(*t.type)) : "unknown"; }

class Checker {
 public:
  Checker(const MetricSet& ms, const DatasetSchema* schema, std::vector<Diagnostic>& diags)
      : ms_(ms), schema_(schema), diags_(diags) {}

  std::map<std::string, std::string> units;
  std::unordered_map<const Expr*, ExprType> types;

  void run() {
    merge_units();
    for (const auto& seg : ms_.segments) check_segment(seg);
    for (const auto& m : ms_.metrics) check_metric(m);
  }

 private:
  void error(SourceLocation loc, std::string message) { diags_.push_back({Severity::Error, std::move(message), loc}); }

  void merge_units() {
    if (schema_) units = schema_->units;
    for (const auto& u : ms_.units) {
      auto it = units.find(u.name);
      if (it != units.end() && it->second != u.key_column) {
        error(u.location, "unit '" + u.name + "' is keyed by '" + u.key_column + "' here but by '" + it->second +
                              "' in the dataset manifest");
        continue;
      }
      units[u.name] = u.key_column;
      if (schema_) {
        const ColumnSchema* col = schema_->find(u.key_column);
        if (!col)
          error(u.location, "unit '" + u.name + "' key column '" + u.key_column + "' is not in the dataset schema");
        else if (col->nullable)
          error(u.location, "unit '" + u.name + "' key column '" + u.key_column + "' must not be nullable");
      }
    }
  }

  void check_segment(const SegmentDefinition& seg) {
    context_ = "segment '" + seg.name + "'";
    if (contains_aggregation(*seg.expr)) {
      error(seg.expr->location, "segment '" + seg.name + "' must not contain aggregations");
      return;
    }
    ExprType t = check(*seg.expr, false);
    if (t.type && *t.type == ValueType::Null)
      error(seg.expr->location, "segment '" + seg.name + "' is always null");
  }

  void check_metric(const MetricDefinition& m) {
    context_ = "metric '" + m.name + "'";
    const Expr& e = *m.expr;
    int depth = aggregation_depth(e);
    if (depth > 2) {
      error(e.location, "metric '" + m.name + "': aggregation nesting depth " + std::to_string(depth) +
                            " exceeds the maximum of 2");
      return;
    }
    auto* agg = e.as<Aggregation>();
    if (!agg || agg->level) {
      error(e.location, "metric '" + m.name +
                            "' must be population-valued: its outermost node must be an aggregation without a unit");
      if (!agg) return;
    }
    check(e, false);
  }

  ExprType check(const Expr& e, bool in_filter) {
    ExprType t = infer(e, in_filter);
    types[&e] = t;
    return t;
  }

  ExprType infer(const Expr& e, bool in_filter) {
    if (auto* c = e.as<ColumnRef>()) {
      if (!schema_) return {std::nullopt, true, Level::Row, {}};
      const ColumnSchema* col = schema_->find(c->name);
      if (!col) {
        error(e.location, "unknown column '" + c->name + "' in " + context_);
        return {std::nullopt, true, Level::Row, {}};
      }
      return {col->type, col->nullable, Level::Row, {}};
    }
    if (auto* l = e.as<Literal>()) return {l->value.type(), l->value.is_null(), Level::Row, {}};

    if (auto* u = e.as<Unary>()) {
      ExprType o = check(*u->operand, in_filter);
      ValueType want = u->op == UnaryOp::Neg ? ValueType::Number : ValueType::Bool;
      if (!compatible(o, want))
        error(e.location, "operator '" + std::string(to_string(u->op)) + "' expects " +
                              std::string(to_string(want)) + ", found " + type_name(o) + " in " + context_);
      row_only(*u->operand, o);
      return {want, o.nullable, Level::Row, {}};
    }

    if (auto* b = e.as<Binary>()) {
      ExprType l = check(*b->lhs, in_filter);
      ExprType r = check(*b->rhs, in_filter);
      row_only(*b->lhs, l);
      row_only(*b->rhs, r);
      std::string op(to_string(b->op));
      if (is_arithmetic(b->op)) {
        if (!compatible(l, ValueType::Number) || !compatible(r, ValueType::Number))
          error(e.location, "operator '" + op + "' expects numbers, found " + type_name(l) + " and " + type_name(r) +
                                " in " + context_);
        return {ValueType::Number, l.nullable || r.nullable || b->op == BinaryOp::Div, Level::Row, {}};
      }
      if (is_logical(b->op)) {
        if (!compatible(l, ValueType::Bool) || !compatible(r, ValueType::Bool))
          error(e.location, "operator '" + op + "' expects bools, found " + type_name(l) + " and " + type_name(r) +
                                " in " + context_);
        return {ValueType::Bool, l.nullable || r.nullable, Level::Row, {}};
      }
      // comparisons
      bool null_test = (b->op == BinaryOp::Eq || b->op == BinaryOp::Ne) &&
                       (is_null_literal(*b->lhs) || is_null_literal(*b->rhs));
      if (null_test) return {ValueType::Bool, false, Level::Row, {}};
      bool known = l.type && r.type && *l.type != ValueType::Null && *r.type != ValueType::Null;
      if (known && *l.type != *r.type) {
        error(e.location, "cannot compare " + type_name(l) + " with " + type_name(r) + " in " + context_);
      } else if (known && *l.type == ValueType::Bool && b->op != BinaryOp::Eq && b->op != BinaryOp::Ne) {
        error(e.location, "operator '" + op + "' is not defined for bools in " + context_);
      }
      return {ValueType::Bool, l.nullable || r.nullable, Level::Row, {}};
    }

    if (auto* c = e.as<Conditional>()) {
      ExprType ct = check(*c->cond, in_filter);
      ExprType tt = check(*c->then_branch, in_filter);
      ExprType et = check(*c->else_branch, in_filter);
      row_only(*c->cond, ct);
      row_only(*c->then_branch, tt);
      row_only(*c->else_branch, et);
      if (!compatible(ct, ValueType::Bool))
        error(c->cond->location, "condition must be bool, found " + type_name(ct) + " in " + context_);
      std::optional<ValueType> result = tt.type;
      if (!result || *result == ValueType::Null) result = et.type;
      if (tt.type && et.type && *tt.type != ValueType::Null && *et.type != ValueType::Null && *tt.type != *et.type)
        error(e.location, "conditional branches have different types (" + type_name(tt) + " and " + type_name(et) +
                              ") in " + context_);
      bool nullable = tt.nullable || et.nullable;
      if (!result && tt.type && et.type) result = ValueType::Null;
      return {result, nullable, Level::Row, {}};
    }

    return aggregation(e, *e.as<Aggregation>(), in_filter);
  }

  // Aggregations may only be the argument of another aggregation.
  void row_only(const Expr& child, const ExprType& t) {
    if (t.level != Level::Row)
      error(child.location, "aggregation cannot be used inside an expression in " + context_ +
                                "; aggregations may only wrap other aggregations");
  }

  ExprType aggregation(const Expr& e, const Aggregation& a, bool in_filter) {
    std::string name(to_string(a.kind));
    if (in_filter) error(e.location, "aggregation not allowed inside a filter predicate in " + context_);

    ExprType result{ValueType::Number, a.kind != AggKind::Sum && a.kind != AggKind::Count, Level::Population, {}};
    if (a.level) {
      result.level = Level::Unit;
      result.unit = *a.level;
      if (!units.count(*a.level))
        error(e.location, "level '" + *a.level + "' is not a declared unit in " + context_);
    }

    if (a.kind == AggKind::Percentile) {
      if (!a.rank)
        error(e.location, "Percentile requires a rank, e.g. Percentile(x, 95), in " + context_);
      else if (!(*a.rank > 0 && *a.rank <= 100))
        error(e.location, "Percentile rank must be in (0, 100], found " + format_number(*a.rank) + " in " + context_);
    } else if (a.rank) {
      error(e.location, "rank parameter only applies to Percentile, not " + name + " in " + context_);
    }

    if (!a.arg && a.kind != AggKind::Count) error(e.location, name + " requires an argument in " + context_);

    if (a.arg) {
      ExprType at = check(*a.arg, in_filter);
      if (auto* inner = a.arg->as<Aggregation>()) {
        if (a.level)
          error(a.arg->location, "unit-level aggregation " + name + "<" + *a.level +
                                     "> must aggregate row values, not another aggregation, in " + context_);
        else if (!inner->level)
          error(a.arg->location, "inner aggregation must declare a unit level, e.g. Sum<User>(...), in " + context_);
        if (a.filter)
          error(a.filter->location, "a filter cannot be applied to an aggregation over unit values in " + context_);
      } else if (at.level != Level::Row) {
        error(a.arg->location, "aggregation cannot be used inside an expression in " + context_);
      }
      if (a.kind != AggKind::Count && !compatible(at, ValueType::Number))
        error(a.arg->location, "non-numeric aggregation argument: " + name + " over " + type_name(at) +
                                   column_note(*a.arg) + " in " + context_);
    }

    if (a.filter) {
      if (contains_aggregation(*a.filter)) {
        error(a.filter->location, "aggregation not allowed inside a filter predicate in " + context_);
      } else {
        ExprType ft = check(*a.filter, true);
        if (!compatible(ft, ValueType::Bool))
          error(a.filter->location, "filter predicate must be bool, found " + type_name(ft) + " in " + context_);
      }
    }
    return result;
  }

  const MetricSet& ms_;
  const DatasetSchema* schema_;
  std::vector<Diagnostic>& diags_;
  std::string context_;
};

}  // namespace

TypeCheckResult type_check(std::shared_ptr<const MetricSet> ms, const DatasetSchema& schema) {
  TypeCheckResult result;
  Checker checker(*ms, &schema, result.diagnostics);
  checker.run();
  if (has_errors(result.diagnostics)) return result;
  TypedMetricSet typed;
  typed.metric_set = std::move(ms);
  typed.schema = schema;
  typed.schema.units = std::move(checker.units);
  typed.types = std::move(checker.types);
  result.typed = std::move(typed);
  return result;
}

std::vector<Diagnostic> check_without_schema(const MetricSet& ms) {
  std::vector<Diagnostic> diags;
  Checker checker(ms, nullptr, diags);
  checker.run();
  return diags;
}

}  // namespace metriq::mdl
