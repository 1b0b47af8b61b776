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

#include "metriq/plan/build.hpp"

#include <algorithm>

namespace metriq::plan {

namespace {

const Value* literal_of(const MetricsPlan& p, NodeId id) {
  const PlanNode& n = p.node(id);
  return n.op == Op::Literal ? &n.literal : nullptr;
}

bool is_number_literal(const MetricsPlan& p, NodeId id, double x) {
  const Value* v = literal_of(p, id);
  return v && v->is_number() && v->as_number() == x;
}

bool hash_less(const MetricsPlan& p, NodeId a, NodeId b) {
  std::uint64_t ha = p.node(a).hash, hb = p.node(b).hash;
  return ha != hb ? ha < hb : a < b;
}

void collect_chain(const MetricsPlan& p, BinaryOp op, NodeId id, std::vector<NodeId>& out) {
  const PlanNode& n = p.node(id);
  if (n.op == Op::Binary && n.binary == op) {
    collect_chain(p, op, n.children[0], out);
    collect_chain(p, op, n.children[1], out);
  } else {
    out.push_back(id);
  }
}

NodeId simplify_logical_chain(MetricsPlan& out, BinaryOp op, NodeId lhs, NodeId rhs) {
  std::vector<NodeId> operands;
  collect_chain(out, op, lhs, operands);
  collect_chain(out, op, rhs, operands);
  bool absorbing = op == BinaryOp::Or;  // `true or x` is true, `false and x` is false
  std::vector<NodeId> kept;
  for (NodeId id : operands) {
    const Value* v = literal_of(out, id);
    if (v && v->is_bool()) {
      if (v->as_bool() == absorbing) return out.literal(Value::boolean(absorbing));
      continue;  // identity element
    }
    kept.push_back(id);
  }
  if (kept.empty()) return out.literal(Value::boolean(!absorbing));
  std::sort(kept.begin(), kept.end(), [&](NodeId a, NodeId b) { return hash_less(out, a, b); });
  // fold literal-only chains, e.g. `null and null`
  bool all_literal = std::all_of(kept.begin(), kept.end(), [&](NodeId id) { return literal_of(out, id); });
  if (all_literal) {
    Value acc = *literal_of(out, kept[0]);
    for (std::size_t i = 1; i < kept.size(); ++i) acc = apply_binary(op, acc, *literal_of(out, kept[i]));
    return out.literal(acc);
  }
  NodeId acc = kept[0];
  for (std::size_t i = 1; i < kept.size(); ++i) acc = out.binary(op, acc, kept[i]);
  return acc;
}

}  // namespace

NodeId simplify(MetricsPlan& out, PlanNode n) {
  auto child = [&](std::size_t i) { return n.children[i]; };
  switch (n.op) {
    case Op::Unary: {
      if (const Value* v = literal_of(out, child(0))) return out.literal(apply_unary(n.unary, *v));
      const PlanNode& c = out.node(child(0));
      if (c.op == Op::Unary && c.unary == n.unary) return c.children[0];
      break;
    }
    case Op::Binary: {
      NodeId l = child(0), r = child(1);
      const Value* lv = literal_of(out, l);
      const Value* rv = literal_of(out, r);
      if (lv && rv) return out.literal(apply_binary(n.binary, *lv, *rv));
      if (is_logical(n.binary)) return simplify_logical_chain(out, n.binary, l, r);
      if ((lv && lv->is_null()) || (rv && rv->is_null())) return out.literal(Value::null());
      if (is_commutative(n.binary) && hash_less(out, r, l)) std::swap(l, r);
      if (n.binary == BinaryOp::Add) {
        if (is_number_literal(out, r, 0)) return l;
        if (is_number_literal(out, l, 0)) return r;
      }
      if (n.binary == BinaryOp::Mul) {
        if (is_number_literal(out, r, 1)) return l;
        if (is_number_literal(out, l, 1)) return r;
      }
      n.children = {l, r};
      break;
    }
    case Op::Conditional: {
      NodeId c = child(0), t = child(1), e = child(2);
      if (const Value* v = literal_of(out, c)) return is_true(*v) ? t : e;
      if (t == e) return t;
      const PlanNode& cond = out.node(c);
      if (cond.op == Op::IsNull && cond.children[0] == e) return simplify(out, [&] {
          PlanNode co;
          co.op = Op::Coalesce;
          co.children = {e, t};
          return co;
        }());
      break;
    }
    case Op::IsNull:
      if (const Value* v = literal_of(out, child(0))) return out.literal(Value::boolean(v->is_null()));
      break;
    case Op::Coalesce: {
      NodeId a = child(0), b = child(1);
      if (const Value* v = literal_of(out, a)) return v->is_null() ? b : a;
      if (a == b) return a;
      if (const Value* v = literal_of(out, b); v && v->is_null()) return a;
      break;
    }
    case Op::Aggregation:
    case Op::GroupedAggregation:
      if (auto f = n.filter()) {
        const Value* v = literal_of(out, *f);
        if (v && is_true(*v)) {
          n.children.erase(n.children.begin() + n.arg_count);
          n.has_filter = false;
        }
      }
      break;
    default: break;
  }
  return out.intern(std::move(n));
}

MetricsPlan normalize(const MetricsPlan& p) {
  MetricsPlan current = rebuild(p, [](MetricsPlan& out, PlanNode n) { return simplify(out, std::move(n)); });
  // A rewrite can expose a new opportunity above it only through nodes it
  // created; iterate to a fixpoint.
  for (int i = 0; i < 16; ++i) {
    MetricsPlan next = rebuild(current, [](MetricsPlan& out, PlanNode n) { return simplify(out, std::move(n)); });
    if (next.digest() == current.digest() && next.size() == current.size()) return next;
    current = std::move(next);
  }
  return current;
}

}  // namespace metriq::plan
