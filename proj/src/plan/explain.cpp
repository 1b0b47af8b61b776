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

#include <sstream>

#include "metriq/error.hpp"
#include "metriq/frontend/printer.hpp"
#include "metriq/hash.hpp"
#include "metriq/plan/build.hpp"

namespace metriq::plan {

std::string node_label(const MetricsPlan& p, NodeId id) {
  const PlanNode& n = p.node(id);
  switch (n.op) {
    case Op::Column: return n.column;
    case Op::Literal: return n.literal.is_string() ? mdl::quote_string(n.literal.as_string()) : to_display(n.literal);
    case Op::Unary: return std::string(to_string(n.unary));
    case Op::Binary: return std::string(to_string(n.binary));
    case Op::Conditional: return "if";
    case Op::IsNull: return "IsNull";
    case Op::Coalesce: return "Coalesce";
    case Op::Aggregation:
    case Op::GroupedAggregation: {
      std::string s(to_string(n.agg));
      if (n.level.tag == AggLevel::Tag::Unit) s += "<" + n.level.unit + ">";
      if (n.rank) s += "[" + format_number(*n.rank) + "]";
      if (n.has_filter) s += " if";
      if (n.op == Op::GroupedAggregation) {
        s += " by (";
        bool first = true;
        for (NodeId k : n.keys()) {
          s += (first ? "" : ", ") + node_label(p, k);
          first = false;
        }
        s += ")";
      }
      return s;
    }
  }
  return "?";
}

nlohmann::json explain_json(const MetricsPlan& p) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId id = 0; id < p.size(); ++id) {
    const PlanNode& n = p.node(id);
    nodes.push_back({{"id", id},
                     {"op", std::string(to_string(n.op))},
                     {"label", node_label(p, id)},
                     {"children", n.children},
                     {"level", n.level.to_string()},
                     {"type", n.type ? std::string(to_string(*n.type)) : "unknown"},
                     {"nullable", n.nullable},
                     {"hash", hex_digest(n.hash)}});
  }
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& [key, id] : p.roots)
    roots.push_back({{"metric", key.metric}, {"slice", key.slice}, {"role", std::string(to_string(key.role))},
                     {"node", id}});
  nlohmann::json estimators = nlohmann::json::object();
  for (const auto& [m, e] : p.estimators) estimators[m] = std::string(to_string(e));
  nlohmann::json segments = nlohmann::json::object();
  for (const auto& [name, id] : p.segment_nodes) segments[name] = id;
  return {{"nodes", nodes},
          {"roots", roots},
          {"segments", segments},
          {"estimators", estimators},
          {"finalized", p.finalized()},
          {"digest", hex_digest(p.digest())}};
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string explain_dot(const MetricsPlan& p, const std::string& title) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(title) << "\" {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (NodeId id = 0; id < p.size(); ++id) {
    const PlanNode& n = p.node(id);
    out << "  n" << id << " [label=\"" << id << ": " << dot_escape(node_label(p, id)) << "\\n"
        << n.level.to_string() << "\"";
    if (n.is_aggregation()) out << ", style=filled, fillcolor=\"#e8eef7\"";
    out << "];\n";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      out << "  n" << n.children[i] << " -> n" << id;
      if (n.is_aggregation() && i >= n.arg_count + (n.has_filter ? 1u : 0u)) out << " [style=dashed]";
      if (n.is_aggregation() && n.has_filter && i == n.arg_count) out << " [style=dotted]";
      out << ";\n";
    }
  }
  std::size_t r = 0;
  for (const auto& [key, id] : p.roots) {
    std::string label = key.metric + (key.slice.empty() ? "" : " " + key.slice) + " " + std::string(to_string(key.role));
    out << "  r" << r << " [shape=ellipse, label=\"" << dot_escape(label) << "\"];\n";
    out << "  n" << id << " -> r" << r << ";\n";
    ++r;
  }
  out << "}\n";
  return out.str();
}

}  // namespace metriq::plan
