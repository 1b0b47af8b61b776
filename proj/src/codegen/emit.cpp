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

#include "metriq/codegen/emit.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "metriq/error.hpp"
#include "metriq/hash.hpp"
#include "metriq/plan/build.hpp"

namespace metriq::codegen {

using plan::AggLevel;
using plan::MetricsPlan;
using plan::NodeId;
using plan::Op;
using plan::PlanNode;
using plan::Role;

namespace {

std::string_view unary_key(UnaryOp op) { return op == UnaryOp::Neg ? "neg" : "not"; }

std::string_view binary_key(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Eq: return "eq";
    case BinaryOp::Ne: return "ne";
    case BinaryOp::Lt: return "lt";
    case BinaryOp::Le: return "le";
    case BinaryOp::Gt: return "gt";
    case BinaryOp::Ge: return "ge";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "";
}

std::string_view agg_key(AggKind k) {
  switch (k) {
    case AggKind::Sum: return "sum";
    case AggKind::Count: return "count";
    case AggKind::Avg: return "avg";
    case AggKind::Min: return "min";
    case AggKind::Max: return "max";
    case AggKind::Percentile: return "percentile";
    case AggKind::SumProduct: return "sum_product";
  }
  return "";
}

// Number literals always carry a decimal point or exponent so that no
// engine reads them as integers.
std::string number_literal(double d) {
  std::string s = format_number(d);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  if (s.front() == '-') return "(" + s + ")";
  return s;
}

std::string column_name(const std::string& metric, Role role) {
  if (role == Role::Value) return "metric." + metric;
  return "moment." + metric + "." + std::string(plan::to_string(role));
}

struct Block {
  std::string name;
  bool from_units = false;
  std::size_t source_block = 0;  // index into blocks, when from_units
  std::vector<NodeId> keys;
  std::vector<NodeId> members;
};

class Emitter {
 public:
  Emitter(const MetricsPlan& p, const FabricDialect& d, std::string table)
      : p_(p), d_(d), table_(std::move(table)) {}

  EmittedProgram run() {
    if (!p_.finalized())
      throw Error(ErrorCode::PlanNotFinalized, "plan is not finalized: run the pass pipeline before emission");
    analyze();
    check_capabilities();
    EmittedProgram prog;
    prog.dialect = d_.name;
    prog.plan_digest = hex_digest(p_.digest());
    std::vector<std::string> ctes;
    row_ctes(ctes);
    block_ctes(ctes);
    std::string body = final_select(prog.columns, ctes);
    std::string text = "WITH\n";
    for (std::size_t i = 0; i < ctes.size(); ++i) text += ctes[i] + (i + 1 < ctes.size() ? ",\n" : "\n");
    prog.text = text + body;
    return prog;
  }

 private:
  const PlanNode& node(NodeId id) const { return p_.node(id); }

  bool is_leaf(NodeId id) const {
    Op op = node(id).op;
    return op == Op::Column || op == Op::Literal;
  }

  bool over_units(const PlanNode& n) const { return n.arg_count > 0 && node(n.children[0]).is_aggregation(); }

  void analyze() {
    auto live = p_.reachable();
    for (NodeId id : plan::topo_order(p_))
      if (live[id]) order_.push_back(id);

    std::map<NodeId, std::set<NodeId>> parents;
    std::set<NodeId> used_by_agg;
    for (NodeId id : order_) {
      const PlanNode& n = node(id);
      for (NodeId c : n.children) parents[c].insert(id);
      if (n.is_aggregation())
        for (NodeId c : n.children)
          if (!node(c).is_aggregation()) used_by_agg.insert(c);
    }
    for (const auto& [key, id] : p_.roots)
      for (NodeId k : node(id).keys()) used_by_agg.insert(k);

    int next = 1;
    for (NodeId id : order_) {
      const PlanNode& n = node(id);
      bool materialize = n.is_aggregation();
      if (!n.is_aggregation() && n.op != Op::Column) {
        bool is_key = false;
        for (NodeId p : parents[id])
          for (NodeId k : node(p).keys()) is_key |= k == id;
        if (n.op == Op::Literal)
          materialize = is_key;
        else
          materialize = used_by_agg.count(id) || parents[id].size() >= 2;
      }
      if (materialize) alias_[id] = "e" + std::to_string(next++);
    }
  }

  // Names the metric and node of the first construct the dialect lacks.
  void check_capabilities() const {
    for (const auto& [key, root] : p_.roots) {
      std::vector<NodeId> stack{root};
      std::set<NodeId> seen;
      while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) continue;
        const PlanNode& n = node(id);
        std::string cap = capability_of(n);
        bool ok = cap.empty() || d_.capabilities.count(cap);
        if (n.op == Op::GroupedAggregation && n.agg == AggKind::Percentile)
          ok = d_.capabilities.count("percentile_rank") || d_.capabilities.count("percentile");
        if (!ok) {
          std::string where = alias_.count(id) ? " (" + alias_.at(id) + ")" : "";
          throw Error(ErrorCode::UnsupportedConstruct,
                      "metric '" + key.metric + "': node " + plan::node_label(p_, id) + where +
                          " is not supported by dialect '" + d_.name + "' (needs capability '" + cap + "')");
        }
        for (NodeId c : n.children) stack.push_back(c);
      }
    }
  }

  static std::string capability_of(const PlanNode& n) {
    switch (n.op) {
      case Op::Column:
      case Op::Literal: return "";
      case Op::Unary: return n.unary == UnaryOp::Neg ? "arithmetic" : "logic";
      case Op::Binary:
        if (is_arithmetic(n.binary)) return "arithmetic";
        if (is_logical(n.binary)) return "logic";
        return "comparison";
      case Op::Conditional: return "conditional";
      case Op::IsNull: return "null_test";
      case Op::Coalesce: return "coalesce";
      case Op::Aggregation:
      case Op::GroupedAggregation: return std::string(agg_key(n.agg));
    }
    return "";
  }

  std::string literal(const Value& v) const {
    switch (v.type()) {
      case ValueType::Null: return d_.render("null", {});
      case ValueType::Bool: return d_.render(v.as_bool() ? "true" : "false", {});
      case ValueType::Number: return number_literal(v.as_number());
      case ValueType::String: return d_.string_literal(v.as_string());
    }
    return {};
  }

  // Reference to a row value: alias, column, literal or inline expression.
  std::string ref(NodeId id) const {
    if (auto it = alias_.find(id); it != alias_.end()) return d_.ident(it->second);
    return inline_expr(id);
  }

  std::string inline_expr(NodeId id) const {
    const PlanNode& n = node(id);
    auto c = [&](std::size_t i) { return ref(n.children[i]); };
    switch (n.op) {
      case Op::Column: return d_.ident(n.column);
      case Op::Literal: return literal(n.literal);
      case Op::Unary: return d_.render(std::string(unary_key(n.unary)), {c(0)});
      case Op::Binary: return d_.render(std::string(binary_key(n.binary)), {c(0), c(1)});
      case Op::Conditional: return d_.render("if", {c(0), c(1), c(2)});
      case Op::IsNull: return d_.render("is_null", {c(0)});
      case Op::Coalesce: return d_.render("coalesce", {c(0), c(1)});
      default: break;
    }
    throw Error(ErrorCode::Internal, "aggregation referenced as a row expression");
  }

  // Row-expression layer: materialized nodes sit one above the deepest
  // materialized node they reference.
  int layer_of(NodeId id) {
    if (auto it = layer_.find(id); it != layer_.end()) return it->second;
    int deepest = 0;
    for (NodeId c : node(id).children) deepest = std::max(deepest, depth_below(c));
    return layer_[id] = deepest + 1;
  }

  int depth_below(NodeId id) {
    if (is_leaf(id) && !alias_.count(id)) return 0;
    if (alias_.count(id)) return layer_of(id);
    int deepest = 0;
    for (NodeId c : node(id).children) deepest = std::max(deepest, depth_below(c));
    return deepest;
  }

  void row_ctes(std::vector<std::string>& ctes) {
    std::string r0 = "  r0 AS (SELECT * FROM " + d_.ident(table_);
    if (p_.assignment) {
      std::string col = d_.ident(p_.assignment->column);
      r0 += " WHERE " + d_.render("or", {d_.render("eq", {col, d_.string_literal(p_.assignment->treatment)}),
                                         d_.render("eq", {col, d_.string_literal(p_.assignment->control)})});
    }
    ctes.push_back(r0 + ")");

    std::map<int, std::vector<NodeId>> layers;
    for (NodeId id : order_)
      if (alias_.count(id) && !node(id).is_aggregation()) layers[layer_of(id)].push_back(id);
    int prev = 0;
    for (const auto& [layer, ids] : layers) {
      std::string s = "  r" + std::to_string(layer) + " AS (SELECT *";
      for (NodeId id : ids) s += ", " + inline_expr(id) + " AS " + d_.ident(alias_.at(id));
      ctes.push_back(s + " FROM r" + std::to_string(prev) + ")");
      prev = layer;
    }
    rows_ = "r" + std::to_string(prev);
  }

  std::string key_col(std::size_t i) const { return d_.ident("k" + std::to_string(i)); }

  std::size_t block_for(NodeId id) {
    const PlanNode& n = node(id);
    Block b;
    b.keys = n.keys();
    if (over_units(n)) {
      b.from_units = true;
      b.source_block = member_block_.at(n.children[0]);
      for (std::size_t i = 0; i < n.arg_count; ++i)
        if (member_block_.at(n.children[i]) != b.source_block)
          throw Error(ErrorCode::Internal, "aggregation arguments come from different unit blocks");
      const auto& inner = blocks_[b.source_block].keys;
      if (inner.size() != b.keys.size() + 1 || !std::equal(b.keys.begin(), b.keys.end(), inner.begin() + 1))
        throw Error(ErrorCode::Internal, "aggregation keys do not extend its argument's keys");
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].from_units == b.from_units && blocks_[i].keys == b.keys &&
          (!b.from_units || blocks_[i].source_block == b.source_block))
        return i;
    b.name = "b" + std::to_string(blocks_.size() + 1);
    blocks_.push_back(std::move(b));
    return blocks_.size() - 1;
  }

  // Aggregate call for one member; `arg` renders argument i in the block's
  // source.
  std::string aggregate_call(NodeId id, const std::function<std::string(std::size_t)>& arg,
                             const std::string& filter) {
    const PlanNode& n = node(id);
    auto value = [&](std::size_t i) {
      std::string a = arg(i);
      return filter.empty() ? a : d_.render("filtered", {a, filter});
    };
    switch (n.agg) {
      case AggKind::Count:
        if (n.arg_count == 0)
          return filter.empty() ? d_.render("count_rows", {}) : d_.render("count_rows_filtered", {filter});
        return d_.render("count", {value(0)});
      case AggKind::SumProduct: return d_.render("sum_product", {value(0), value(1)});
      case AggKind::Percentile: {
        if (!d_.capabilities.count("percentile_rank")) {
          std::string fraction = number_literal(*n.rank / 100.0);
          return d_.render("percentile", {value(0), fraction});
        }
        const auto& w = window_.at(id);
        return d_.render("rank_pick", {d_.ident(w.rn), d_.ident(w.n), number_literal(*n.rank), w.value});
      }
      default: return d_.render(std::string(agg_key(n.agg)), {value(0)});
    }
  }

  struct Window {
    std::string rn, n, value;
  };

  void block_ctes(std::vector<std::string>& ctes) {
    for (NodeId id : order_) {
      if (!node(id).is_aggregation()) continue;
      std::size_t b = block_for(id);
      blocks_[b].members.push_back(id);
      member_block_[id] = b;
    }
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const Block& b = blocks_[bi];
      std::string source = b.from_units ? blocks_[b.source_block].name : rows_;
      const Block* src = b.from_units ? &blocks_[b.source_block] : nullptr;

      auto arg_of = [&](NodeId m, std::size_t i) {
        NodeId a = node(m).children[i];
        return src ? d_.ident(alias_.at(a)) : ref(a);
      };
      std::vector<std::string> key_refs;
      for (std::size_t k = 0; k < b.keys.size(); ++k) key_refs.push_back(src ? key_col(k + 1) : ref(b.keys[k]));

      // Nearest-rank percentiles rank their values in window CTEs stacked
      // on the block's source.
      int w = 0;
      if (d_.capabilities.count("percentile_rank")) {
        for (NodeId m : b.members) {
          const PlanNode& n = node(m);
          if (n.agg != AggKind::Percentile) continue;
          std::string v = arg_of(m, 0);
          if (n.has_filter) v = d_.render("filtered", {v, ref(*n.filter())});
          std::string partition;
          for (const auto& k : key_refs) partition += k + ", ";
          partition = d_.render("rank_partition", {partition + d_.render("is_null", {v})});
          Window win{alias_.at(m) + "_rn", alias_.at(m) + "_n", v};
          std::string name = b.name + "w" + std::to_string(++w);
          ctes.push_back("  " + name + " AS (SELECT *, " + d_.render("rank_row_number", {partition, v}) + " AS " +
                         d_.ident(win.rn) + ", " + d_.render("rank_count", {partition}) + " AS " +
                         d_.ident(win.n) + " FROM " + source + ")");
          window_[m] = win;
          source = name;
        }
      }

      std::string s = "  " + b.name + " AS (SELECT ";
      std::vector<std::string> items;
      for (std::size_t k = 0; k < key_refs.size(); ++k) items.push_back(key_refs[k] + " AS " + key_col(k));
      for (NodeId m : b.members) {
        const PlanNode& n = node(m);
        std::string filter = n.has_filter ? ref(*n.filter()) : std::string();
        if (src && n.has_filter) throw Error(ErrorCode::Internal, "filter on an aggregation over unit values");
        items.push_back(aggregate_call(m, [&](std::size_t i) { return arg_of(m, i); }, filter) + " AS " +
                        d_.ident(alias_.at(m)));
      }
      for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
      s += " FROM " + source;
      if (!key_refs.empty()) {
        s += " GROUP BY ";
        for (std::size_t k = 0; k < key_refs.size(); ++k) s += (k ? ", " : "") + key_refs[k];
      }
      ctes.push_back(s + ")");
    }
  }

  std::string final_select(std::vector<OutputColumn>& columns, std::vector<std::string>& ctes) {
    bool experiment = p_.experiment();
    std::vector<std::string> segments;
    std::map<std::string, ValueType> segment_types;
    for (const auto& set : p_.slice_sets)
      for (const auto& s : set.segments)
        if (std::find(segments.begin(), segments.end(), s) == segments.end()) segments.push_back(s);
    std::vector<std::pair<std::string, Role>> value_cols;
    for (const auto& [key, id] : p_.roots) {
      std::pair<std::string, Role> c{key.metric, key.role};
      if (std::find(value_cols.begin(), value_cols.end(), c) == value_cols.end()) value_cols.push_back(c);
    }

    // Segment types come from the key nodes.
    std::size_t variant_keys = experiment ? 1 : 0;
    for (const auto& set : p_.slice_sets)
      for (const auto& [key, id] : p_.roots) {
        if (key.slice != set.id) continue;
        auto keys = node(id).keys();
        for (std::size_t i = 0; i < set.segments.size() && variant_keys + i < keys.size(); ++i) {
          auto t = node(keys[variant_keys + i]).type;
          segment_types.emplace(set.segments[i], t && *t != ValueType::Null ? *t : ValueType::String);
        }
      }

    columns.push_back({"slice", OutputColumn::Kind::Slice, ValueType::String, {}, Role::Value, {}});
    if (experiment) columns.push_back({"variant", OutputColumn::Kind::Variant, ValueType::String, {}, Role::Value, {}});
    for (const auto& s : segments)
      columns.push_back({"seg." + s, OutputColumn::Kind::Segment, segment_types.count(s) ? segment_types[s] : ValueType::String,
                         {}, Role::Value, s});
    for (const auto& [m, r] : value_cols)
      columns.push_back({column_name(m, r), r == Role::Value ? OutputColumn::Kind::Metric : OutputColumn::Kind::Moment,
                         ValueType::Number, m, r, {}});

    std::vector<std::string> selects;
    for (std::size_t si = 0; si < p_.slice_sets.size(); ++si) {
      const auto& set = p_.slice_sets[si];
      std::map<std::pair<std::string, Role>, NodeId> roots;
      for (const auto& [key, id] : p_.roots)
        if (key.slice == set.id) roots[{key.metric, key.role}] = id;
      if (roots.empty()) continue;
      std::vector<NodeId> keys = node(roots.begin()->second).keys();

      std::vector<std::size_t> used;
      for (const auto& [mr, id] : roots) {
        std::size_t b = member_block_.at(id);
        if (blocks_[b].keys != keys) throw Error(ErrorCode::Internal, "roots of slice '" + set.id + "' disagree on keys");
        if (std::find(used.begin(), used.end(), b) == used.end()) used.push_back(b);
      }

      std::string anchor;
      std::string from;
      if (keys.empty()) {
        anchor = blocks_[used.front()].name;
        from = " FROM " + anchor;
        for (std::size_t i = 1; i < used.size(); ++i)
          from += " LEFT JOIN " + blocks_[used[i]].name + " ON " + d_.render("true", {});
      } else {
        anchor = "s" + std::to_string(si + 1);
        std::string s = "  " + anchor + " AS (SELECT DISTINCT ";
        for (std::size_t k = 0; k < keys.size(); ++k) s += (k ? ", " : "") + ref(keys[k]) + " AS " + key_col(k);
        ctes.push_back(s + " FROM " + rows_ + ")");
        from = " FROM " + anchor;
        for (std::size_t b : used) {
          from += " LEFT JOIN " + blocks_[b].name + " ON ";
          for (std::size_t k = 0; k < keys.size(); ++k) {
            if (k) from += " AND ";
            from += d_.render("null_safe_eq", {anchor + "." + key_col(k), blocks_[b].name + "." + key_col(k)});
          }
        }
      }

      std::vector<std::string> items;
      items.push_back(d_.string_literal(set.id) + " AS " + d_.ident("slice"));
      if (experiment) items.push_back(anchor + "." + key_col(0) + " AS " + d_.ident("variant"));
      for (const auto& seg : segments) {
        auto pos = std::find(set.segments.begin(), set.segments.end(), seg);
        std::string v = pos == set.segments.end()
                            ? d_.render("typed_null", {d_.type_name(segment_types.count(seg) ? segment_types[seg]
                                                                                              : ValueType::String)})
                            : anchor + "." + key_col(variant_keys + static_cast<std::size_t>(pos - set.segments.begin()));
        items.push_back(v + " AS " + d_.ident("seg." + seg));
      }
      for (const auto& [m, r] : value_cols) {
        auto it = roots.find({m, r});
        std::string v = it == roots.end()
                            ? d_.render("typed_null", {d_.type_name(ValueType::Number)})
                            : blocks_[member_block_.at(it->second)].name + "." + d_.ident(alias_.at(it->second));
        items.push_back(v + " AS " + d_.ident(column_name(m, r)));
      }
      std::string s = "SELECT ";
      for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
      selects.push_back(s + from);
    }

    std::string body;
    for (std::size_t i = 0; i < selects.size(); ++i) body += (i ? "\nUNION ALL\n" : "") + selects[i];
    body += "\nORDER BY ";
    std::size_t order_cols = 1 + variant_keys + segments.size();
    for (std::size_t i = 0; i < order_cols; ++i) body += (i ? ", " : "") + d_.ident(columns[i].name);
    return body + "\n";
  }

  const MetricsPlan& p_;
  const FabricDialect& d_;
  std::string table_;
  std::vector<NodeId> order_;
  std::map<NodeId, std::string> alias_;
  std::map<NodeId, int> layer_;
  std::string rows_;
  std::vector<Block> blocks_;
  std::map<NodeId, std::size_t> member_block_;
  std::map<NodeId, Window> window_;
};

}  // namespace

EmittedProgram emit(const MetricsPlan& p, const FabricDialect& d, const std::string& table) {
  return Emitter(p, d, table).run();
}

nlohmann::json output_schema_json(const EmittedProgram& prog) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : prog.columns) {
    static const char* kinds[] = {"slice", "variant", "segment", "metric", "moment"};
    nlohmann::json j = {{"name", c.name}, {"kind", kinds[static_cast<int>(c.kind)]}, {"type", to_string(c.type)}};
    if (!c.metric.empty()) j["metric"] = c.metric;
    if (c.kind == OutputColumn::Kind::Moment) j["role"] = plan::to_string(c.role);
    if (!c.segment.empty()) j["segment"] = c.segment;
    cols.push_back(j);
  }
  return {{"dialect", prog.dialect}, {"plan_digest", prog.plan_digest}, {"columns", cols}};
}

}  // namespace metriq::codegen
