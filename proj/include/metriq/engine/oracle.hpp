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

#include <string>

#include "metriq/engine/config.hpp"
#include "metriq/engine/dataset.hpp"
#include "metriq/engine/scorecard.hpp"

namespace metriq {

/// Reference scorecard computed straight from the AST with nested loops:
/// no plan, no transforms, no shared evaluation code beyond the parser.
/// Variances use two-pass definition formulas over per-unit value lists.
/// Metadata digests are left empty.
Scorecard brute_force_oracle(const std::string& metric_source, const Dataset& ds, const AnalysisConfig& cfg);

}  // namespace metriq
