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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metriq/frontend/ast.hpp"

namespace metriq::mdl {

struct ParseResult {
  std::optional<MetricSet> metric_set;  // empty when any error was reported
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return metric_set.has_value(); }
};

/// Parses a metric-set source file. Besides syntax this checks declaration
/// level rules: unique names, group members that exist, non-empty groups.
/// Group membership merges `group` declarations with `in` tags.
ParseResult parse_metric_set(std::string_view source, std::string name = "metrics");

struct ExprParseResult {
  ExprPtr expr;
  std::vector<Diagnostic> diagnostics;
};

/// Parses a single expression (used by tests and tools).
ExprParseResult parse_expression(std::string_view source);

}  // namespace metriq::mdl
