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

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "metriq/frontend/ast.hpp"
#include "metriq/schema.hpp"

namespace metriq::mdl {

enum class Level : std::uint8_t { Row, Unit, Population };

struct ExprType {
  std::optional<ValueType> type;  // nullopt: unknown (schema-free checking)
  bool nullable = false;
  Level level = Level::Row;
  std::string unit;  // for Level::Unit
};

/// A metric set whose every expression node carries an ExprType. Holds the
/// schema it was checked against, with unit declarations from both the
/// metric set and the manifest merged into `schema.units`.
struct TypedMetricSet {
  std::shared_ptr<const MetricSet> metric_set;
  DatasetSchema schema;
  std::unordered_map<const Expr*, ExprType> types;

  const ExprType& type_of(const Expr& e) const { return types.at(&e); }
};

struct TypeCheckResult {
  std::optional<TypedMetricSet> typed;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return typed.has_value(); }
};

TypeCheckResult type_check(std::shared_ptr<const MetricSet> ms, const DatasetSchema& schema);

/// Placement, nesting, unit and rank rules that do not need column types.
std::vector<Diagnostic> check_without_schema(const MetricSet& ms);

}  // namespace metriq::mdl
