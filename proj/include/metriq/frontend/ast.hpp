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
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "metriq/ops.hpp"
#include "metriq/value.hpp"

namespace metriq::mdl {

struct SourceLocation {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceLocation location;
};

/// "line:col: error: message"
std::string format(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& diags);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColumnRef {
  std::string name;
};
struct Literal {
  Value value;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Conditional {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
/// `Kind<level>(arg, rank if filter)`. `arg` is null only for Count();
/// `rank` is set only for Percentile.
struct Aggregation {
  AggKind kind = AggKind::Sum;
  std::optional<std::string> level;
  ExprPtr arg;
  std::optional<double> rank;
  ExprPtr filter;
};

/// Immutable expression node. Trees are shared through ExprPtr and may be
/// read from several threads.
struct Expr {
  std::variant<ColumnRef, Literal, Unary, Binary, Conditional, Aggregation> node;
  SourceLocation location;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

ExprPtr make_column(std::string name, SourceLocation loc = {});
ExprPtr make_literal(Value v, SourceLocation loc = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourceLocation loc = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLocation loc = {});
ExprPtr make_conditional(ExprPtr c, ExprPtr t, ExprPtr e, SourceLocation loc = {});
ExprPtr make_aggregation(Aggregation agg, SourceLocation loc = {});

/// Equality ignoring source locations.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Number of nested aggregations on the deepest path (0 for row expressions).
int aggregation_depth(const Expr& e);
bool contains_aggregation(const Expr& e);

struct UnitDecl {
  std::string name;
  std::string key_column;
  SourceLocation location;
};

struct MetricDefinition {
  std::string name;
  ExprPtr expr;
  std::vector<std::string> groups;  // `in` tags
  std::optional<std::string> description;
  SourceLocation location;
};

struct SegmentDefinition {
  std::string name;
  ExprPtr expr;
  SourceLocation location;
};

struct MetricGroup {
  std::string name;
  std::vector<std::string> members;
  SourceLocation location;
};

struct MetricSet {
  std::string name;
  std::vector<UnitDecl> units;
  std::vector<MetricDefinition> metrics;
  std::vector<SegmentDefinition> segments;
  std::vector<MetricGroup> groups;

  const UnitDecl* find_unit(const std::string& n) const;
  const MetricDefinition* find_metric(const std::string& n) const;
  const SegmentDefinition* find_segment(const std::string& n) const;
  const MetricGroup* find_group(const std::string& n) const;
};

/// Compares declarations and expressions; the set name and locations are
/// not part of the structure.
bool structurally_equal(const MetricSet& a, const MetricSet& b);

}  // namespace metriq::mdl
