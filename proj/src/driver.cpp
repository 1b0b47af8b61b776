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

#include "metriq/driver.hpp"

#include "metriq/engine/interpreter.hpp"
#include "metriq/error.hpp"
#include "metriq/frontend/parser.hpp"
#include "metriq/plan/build.hpp"

namespace metriq {

namespace {

[[noreturn]] void throw_diagnostics(ErrorCode code, const std::vector<mdl::Diagnostic>& diags,
                                    const std::string& source_name) {
  std::string msg;
  for (const auto& d : diags) msg += (msg.empty() ? "" : "\n") + source_name + ":" + mdl::format(d);
  throw Error(code, msg);
}

}  // namespace

Compiled compile_metrics(const std::string& source, const DatasetSchema& schema, const AnalysisConfig& cfg,
                         const std::string& source_name) {
  auto parsed = mdl::parse_metric_set(source);
  if (!parsed.ok()) throw_diagnostics(ErrorCode::Syntax, parsed.diagnostics, source_name);
  auto checked = mdl::type_check(std::make_shared<const mdl::MetricSet>(std::move(*parsed.metric_set)), schema);
  if (!checked.ok()) throw_diagnostics(ErrorCode::Type, checked.diagnostics, source_name);
  Compiled c{std::move(*checked.typed), {}, {}};
  c.initial = plan::build_plan(c.typed, cfg);
  c.pipeline = transforms::run_pipeline(c.initial, cfg);
  return c;
}

Scorecard run_analysis(const Compiled& c, const Dataset& ds, const AnalysisConfig& cfg) {
  return execute_plan(c.plan(), ds, AssemblyOptions{cfg.max_segment_cardinality});
}

}  // namespace metriq
