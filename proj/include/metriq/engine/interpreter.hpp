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

#include "metriq/engine/dataset.hpp"
#include "metriq/engine/scorecard.hpp"
#include "metriq/plan/plan.hpp"

namespace metriq {

/// Row indices that take part in the analysis: in experiment mode, rows
/// labeled treatment or control. Throws ContaminatedAssignment when a
/// randomization unit appears in both variants.
std::vector<std::size_t> analysis_rows(const plan::MetricsPlan& p, const Dataset& ds);

/// Values of row-level node `id` on every analysis row, in row order.
std::vector<Value> evaluate_rows(const plan::MetricsPlan& p, plan::NodeId id, const Dataset& ds);

/// Evaluates every root bottom-up. Works on finalized and unfinalized plans;
/// an unfinalized Aggregation groups by its unit key (Unit level) or not at
/// all (Population level).
RootValues evaluate_plan(const plan::MetricsPlan& p, const Dataset& ds);

/// evaluate_plan + assemble_scorecard. Throws PlanNotFinalized.
Scorecard execute_plan(const plan::MetricsPlan& p, const Dataset& ds, const AssemblyOptions& opts = {});

}  // namespace metriq
