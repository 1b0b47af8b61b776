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
#include <vector>

#include "json.hpp"
#include "metriq/codegen/dialect.hpp"
#include "metriq/plan/plan.hpp"

namespace metriq::codegen {

struct OutputColumn {
  enum class Kind { Slice, Variant, Segment, Metric, Moment };
  std::string name;
  Kind kind = Kind::Metric;
  ValueType type = ValueType::Number;
  std::string metric;   // Metric, Moment
  plan::Role role = plan::Role::Value;
  std::string segment;  // Segment
};

struct EmittedProgram {
  std::string dialect;
  std::string text;
  std::vector<OutputColumn> columns;
  std::string plan_digest;
};

/// Query text for a finalized plan: row-expression CTEs, per-unit blocks,
/// population blocks, then one SELECT per slice set joined by UNION ALL.
/// Throws PlanNotFinalized or UnsupportedConstruct.
EmittedProgram emit(const plan::MetricsPlan& p, const FabricDialect& d, const std::string& table = "events");

nlohmann::json output_schema_json(const EmittedProgram& prog);

}  // namespace metriq::codegen
