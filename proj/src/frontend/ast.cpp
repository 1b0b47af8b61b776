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

#include "metriq/frontend/ast.hpp"

#include <algorithm>
#include <cmath>

namespace metriq::mdl {

std::string format(const Diagnostic& d) {
  return std::to_string(d.location.line) + ":" + std::to_string(d.location.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

ExprPtr make_column(std::string name, SourceLocation loc) {
  return std::make_shared<const Expr>(Expr{ColumnRef{std::move(name)}, loc});
}
ExprPtr make_literal(Value v, SourceLocation loc) { return std::make_shared<const Expr>(Expr{Literal{std::move(v)}, loc}); }
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceLocation loc) {
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand)}, loc});
}
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLocation loc) {
  return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}, loc});
}
ExprPtr make_conditional(ExprPtr c, ExprPtr t, ExprPtr e, SourceLocation loc) {
  return std::make_shared<const Expr>(Expr{Conditional{std::move(c), std::move(t), std::move(e)}, loc});
}
ExprPtr make_aggregation(Aggregation agg, SourceLocation loc) {
  return std::make_shared<const Expr>(Expr{std::move(agg), loc});
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = a.as<ColumnRef>()) return x->name == b.as<ColumnRef>()->name;
  if (auto* x = a.as<Literal>()) {
    const Value& u = x->value;
    const Value& v = b.as<Literal>()->value;
    // distinguish -0 from +0 so that printing is checked bit for bit
    if (u.is_number() && v.is_number()) return std::signbit(u.as_number()) == std::signbit(v.as_number()) && u == v;
    return u == v;
  }
  if (auto* x = a.as<Unary>()) {
    auto* y = b.as<Unary>();
    return x->op == y->op && structurally_equal(x->operand, y->operand);
  }
  if (auto* x = a.as<Binary>()) {
    auto* y = b.as<Binary>();
    return x->op == y->op && structurally_equal(x->lhs, y->lhs) && structurally_equal(x->rhs, y->rhs);
  }
  if (auto* x = a.as<Conditional>()) {
    auto* y = b.as<Conditional>();
    return structurally_equal(x->cond, y->cond) && structurally_equal(x->then_branch, y->then_branch) &&
           structurally_equal(x->else_branch, y->else_branch);
  }
  auto* x = a.as<Aggregation>();
  auto* y = b.as<Aggregation>();
  return x->kind == y->kind && x->level == y->level && x->rank == y->rank && structurally_equal(x->arg, y->arg) &&
         structurally_equal(x->filter, y->filter);
}

int aggregation_depth(const Expr& e) {
  auto depth = [](const ExprPtr& p) { return p ? aggregation_depth(*p) : 0; };
  if (auto* u = e.as<Unary>()) return depth(u->operand);
  if (auto* b = e.as<Binary>()) return std::max(depth(b->lhs), depth(b->rhs));
  if (auto* c = e.as<Conditional>()) return std::max({depth(c->cond), depth(c->then_branch), depth(c->else_branch)});
  if (auto* a = e.as<Aggregation>()) return 1 + std::max(depth(a->arg), depth(a->filter));
  return 0;
}

bool contains_aggregation(const Expr& e) { return aggregation_depth(e) > 0; }

namespace {
template <class T>
const T* find_named(const std::vector<T>& items, const std::string& n) {
  for (const auto& item : items)
    if (item.name == n) return &item;
  return nullptr;
}
}  // namespace

const UnitDecl* MetricSet::find_unit(const std::string& n) const { return find_named(units, n); }
const MetricDefinition* MetricSet::find_metric(const std::string& n) const { return find_named(metrics, n); }
const SegmentDefinition* MetricSet::find_segment(const std::string& n) const { return find_named(segments, n); }
const MetricGroup* MetricSet::find_group(const std::string& n) const { return find_named(groups, n); }

bool structurally_equal(const MetricSet& a, const MetricSet& b) {
  if (a.units.size() != b.units.size() || a.metrics.size() != b.metrics.size() ||
      a.segments.size() != b.segments.size() || a.groups.size() != b.groups.size())
    return false;
  for (std::size_t i = 0; i < a.units.size(); ++i)
    if (a.units[i].name != b.units[i].name || a.units[i].key_column != b.units[i].key_column) return false;
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    const auto &x = a.metrics[i], &y = b.metrics[i];
    if (x.name != y.name || x.groups != y.groups || x.description != y.description ||
        !structurally_equal(x.expr, y.expr))
      return false;
  }
  for (std::size_t i = 0; i < a.segments.size(); ++i)
    if (a.segments[i].name != b.segments[i].name || !structurally_equal(a.segments[i].expr, b.segments[i].expr))
      return false;
  for (std::size_t i = 0; i < a.groups.size(); ++i)
    if (a.groups[i].name != b.groups[i].name || a.groups[i].members != b.groups[i].members) return false;
  return true;
}

}  // namespace metriq::mdl
