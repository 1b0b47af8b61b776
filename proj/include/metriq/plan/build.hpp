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

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/engine/config.hpp"
#include "metriq/frontend/type_check.hpp"
#include "metriq/plan/plan.hpp"

namespace metriq::plan {

/// One root per requested metric (slice ""), plus the row expressions of
/// every segment the config refers to. Throws UnknownGroup, UnknownMetric,
/// EmptyRequest, UnknownUnit or Config.
MetricsPlan build_plan(const mdl::TypedMetricSet& tms, const AnalysisConfig& cfg);

/// Lowers one AST expression into `p`. `x == null` becomes IsNull(x).
NodeId lower(MetricsPlan& p, const mdl::Expr& e);

/// Canonical form: constants folded, commutative operands sorted by
/// structural hash, and/or chains flattened and re-associated left, double
/// negations removed, `x + 0` and `x * 1` simplified, constant and
/// identical-branch conditionals resolved, `if IsNull(x) then k else x`
/// rewritten to Coalesce(x, k). Idempotent.
MetricsPlan normalize(const MetricsPlan& p);

/// Single-node canonicalization used by normalize; `n`'s children must
/// already be canonical nodes of `out`.
NodeId simplify(MetricsPlan& out, PlanNode n);

/// Receives the node being rebuilt with its children already remapped into
/// `out`, and returns its replacement.
using RewriteFn = std::function<NodeId(MetricsPlan& out, PlanNode node)>;

/// Post-order rebuild from roots and segment nodes into a fresh plan with
/// the same context; the result holds only reachable nodes.
MetricsPlan rebuild(const MetricsPlan& p, const RewriteFn& fn);

/// Drops unreachable nodes and merges structural duplicates.
MetricsPlan compact(const MetricsPlan& p);

/// Short human label, e.g. `Sum<User>`, `"US"`, `+`.
std::string node_label(const MetricsPlan& p, NodeId id);

/// {nodes: [{id, op, label, children, level, type, nullable, hash}],
///  roots: [{metric, slice, role, node}], estimators: {...}, digest}
nlohmann::json explain_json(const MetricsPlan& p);
std::string explain_dot(const MetricsPlan& p, const std::string& title = "plan");

}  // namespace metriq::plan
