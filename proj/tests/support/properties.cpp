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

#include "properties.hpp"

#include <map>

#include "metriq/engine/interpreter.hpp"
#include "metriq/error.hpp"
#include "metriq/frontend/parser.hpp"
#include "metriq/plan/build.hpp"
#include "metriq/synth/synth.hpp"

namespace metriq::testing {

using plan::MetricsPlan;
using plan::NodeId;

MetricsPlan expression_plan(const std::string& src) {
  auto parsed = mdl::parse_expression(src);
  if (!parsed.expr) throw Error(ErrorCode::Syntax, "cannot parse expression: " + src);
  MetricsPlan p;
  p.schema = synth::synthetic_schema();
  p.roots[{"e", plan::kUnslicedId, plan::Role::Value}] = plan::lower(p, *parsed.expr);
  return p;
}

NodeId only_root(const MetricsPlan& p) { return p.roots.begin()->second; }

MetricsPlan mirror(const MetricsPlan& p) {
  return plan::rebuild(p, [](MetricsPlan& out, plan::PlanNode n) {
    if (n.op == plan::Op::Binary && is_commutative(n.binary)) std::swap(n.children[0], n.children[1]);
    return out.intern(std::move(n));
  });
}

std::string structure(const MetricsPlan& p, NodeId id) {
  std::string s = std::string(plan::to_string(p.node(id).op)) + ":" + plan::node_label(p, id) + "(";
  for (NodeId c : p.node(id).children) s += structure(p, c) + ",";
  return s + ")";
}

NormalizationCheck check_normalization(std::uint64_t seed, std::size_t trees) {
  std::vector<Dataset> datasets;
  for (std::uint64_t s : {3, 5, 8, 13}) {
    synth::CaseLimits limits;
    limits.max_rows = 200;
    auto c = synth::generate_case(seed * 31 + s, limits);
    if (c.data.row_count > 0) datasets.push_back(std::move(c.data));
  }

  NormalizationCheck out;
  auto fail = [&](std::size_t& counter, const std::string& what) {
    if (out.first_failure.empty()) out.first_failure = what;
    ++counter;
  };
  synth::Rng rng(seed);
  std::map<std::uint64_t, std::string> by_hash;
  std::map<std::string, std::uint64_t> by_structure;
  for (std::size_t i = 0; i < trees; ++i) {
    std::string src = synth::random_row_expression(rng, 1 + static_cast<int>(rng.below(4)), rng.chance(0.4));
    MetricsPlan raw = expression_plan(src);
    MetricsPlan once = plan::normalize(raw);
    MetricsPlan twice = plan::normalize(once);
    ++out.trees;
    if (once.digest() != twice.digest() || once.size() != twice.size()) fail(out.not_idempotent, "idempotence: " + src);

    for (const Dataset& ds : datasets) {
      auto before = evaluate_rows(raw, only_root(raw), ds);
      auto after = evaluate_rows(once, only_root(once), ds);
      for (std::size_t r = 0; r < before.size(); ++r) {
        ++out.rows_compared;
        if (!(before[r] == after[r])) {
          fail(out.value_changes, "value: " + src + " row " + std::to_string(r) + ": " + to_display(before[r]) +
                                      " vs " + to_display(after[r]));
          break;
        }
      }
    }

    MetricsPlan mirrored = plan::normalize(mirror(raw));
    if (mirrored.node(only_root(mirrored)).hash != once.node(only_root(once)).hash)
      fail(out.mirror_mismatches, "mirror: " + src);

    for (NodeId id = 0; id < once.size(); ++id) {
      std::string s = structure(once, id);
      std::uint64_t h = once.node(id).hash;
      auto [hit, fresh_hash] = by_hash.emplace(h, s);
      auto [sit, fresh_structure] = by_structure.emplace(s, h);
      if (hit->second != s || sit->second != h) fail(out.collisions, "hash: " + s);
    }
  }
  out.distinct_hashes = by_hash.size();
  return out;
}

}  // namespace metriq::testing
