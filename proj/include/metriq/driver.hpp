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
#include <string>

#include "metriq/engine/config.hpp"
#include "metriq/engine/dataset.hpp"
#include "metriq/engine/scorecard.hpp"
#include "metriq/frontend/type_check.hpp"
#include "metriq/plan/plan.hpp"
#include "metriq/transforms/passes.hpp"

namespace metriq {

/// Everything derived from one metric-set source under one config.
struct Compiled {
  mdl::TypedMetricSet typed;
  plan::MetricsPlan initial;
  transforms::PipelineResult pipeline;

  const plan::MetricsPlan& plan() const { return pipeline.plan; }
};

/// parse -> type check -> build_plan -> pass pipeline. Syntax and type
/// diagnostics are thrown as one Error (Syntax or Type) whose message lists
/// them as `source:line:col: error: ...`.
Compiled compile_metrics(const std::string& source, const DatasetSchema& schema, const AnalysisConfig& cfg,
                         const std::string& source_name = "<metrics>");

/// execute_plan with the config's assembly options.
Scorecard run_analysis(const Compiled& c, const Dataset& ds, const AnalysisConfig& cfg);

}  // namespace metriq
