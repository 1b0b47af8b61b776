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

#include "metriq/frontend/printer.hpp"

#include <cmath>

namespace metriq::mdl {

namespace {

// Mirrors the parser's binding powers.
constexpr int kLowest = 0, kOr = 1, kAnd = 2, kNot = 3, kCompare = 4, kTerm = 5, kFactor = 6, kUnary = 7, kAtom = 8;

int binary_prec(BinaryOp op) {
  if (op == BinaryOp::Or) return kOr;
  if (op == BinaryOp::And) return kAnd;
  if (is_comparison(op)) return kCompare;
  if (op == BinaryOp::Add || op == BinaryOp::Sub) return kTerm;
  return kFactor;
}

int prec_of(const Expr& e) {
  if (auto* b = e.as<Binary>()) return binary_prec(b->op);
  if (auto* u = e.as<Unary>()) return u->op == UnaryOp::Neg ? kUnary : kNot;
  if (e.as<Conditional>()) return kLowest;
  return kAtom;
}

std::string number_text(double d) {
  if (std::signbit(d)) return "-" + format_number(-d);
  return format_number(d);
}

void print(const Expr& e, int min_prec, std::string& out);

void print_child(const ExprPtr& e, int min_prec, std::string& out) { print(*e, min_prec, out); }

void print(const Expr& e, int min_prec, std::string& out) {
  bool parens = prec_of(e) < min_prec;
  if (parens) out += '(';

  if (auto* c = e.as<ColumnRef>()) {
    out += c->name;
  } else if (auto* l = e.as<Literal>()) {
    const Value& v = l->value;
    switch (v.type()) {
      case ValueType::Null: out += "null"; break;
      case ValueType::Bool: out += v.as_bool() ? "true" : "false"; break;
      case ValueType::Number: out += number_text(v.as_number()); break;
      case ValueType::String: out += quote_string(v.as_string()); break;
    }
  } else if (auto* u = e.as<Unary>()) {
    if (u->op == UnaryOp::Neg) {
      out += '-';
      // `-5` would re-parse as a negative literal
      if (u->operand->as<Literal>()) {
        out += '(';
        print_child(u->operand, kLowest, out);
        out += ')';
      } else {
        print_child(u->operand, kUnary, out);
      }
    } else {
      out += "not ";
      print_child(u->operand, kNot, out);
    }
  } else if (auto* b = e.as<Binary>()) {
    int p = binary_prec(b->op);
    bool non_assoc = p == kCompare;
    print_child(b->lhs, non_assoc ? p + 1 : p, out);
    out += ' ';
    out += to_string(b->op);
    out += ' ';
    print_child(b->rhs, p + 1, out);
  } else if (auto* c = e.as<Conditional>()) {
    out += "if ";
    print_child(c->cond, kOr, out);
    out += " then ";
    print_child(c->then_branch, kLowest, out);
    out += " else ";
    print_child(c->else_branch, kLowest, out);
  } else if (auto* a = e.as<Aggregation>()) {
    out += to_string(a->kind);
    if (a->level) out += "<" + *a->level + ">";
    out += '(';
    bool any = false;
    if (a->arg) {
      print_child(a->arg, kLowest, out);
      any = true;
    }
    if (a->rank) {
      out += ", ";
      out += number_text(*a->rank);
      any = true;
    }
    if (a->filter) {
      if (any) out += ' ';
      out += "if ";
      print_child(a->filter, kOr, out);
    }
    out += ')';
  }

  if (parens) out += ')';
}

}  // namespace

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string pretty_print(const Expr& e) {
  std::string out;
  print(e, kLowest, out);
  return out;
}

std::string pretty_print(const MetricSet& ms) {
  std::string out = "// metric set: " + ms.name + "\n";
  for (const auto& u : ms.units) out += "unit " + u.name + " = " + u.key_column + ";\n";
  for (const auto& s : ms.segments) out += "segment " + s.name + " = " + pretty_print(*s.expr) + ";\n";
  for (const auto& m : ms.metrics) {
    if (m.description) out += "/// " + *m.description + "\n";
    out += "metric " + m.name;
    for (std::size_t i = 0; i < m.groups.size(); ++i) out += (i == 0 ? " in " : ", ") + m.groups[i];
    out += " = " + pretty_print(*m.expr) + ";\n";
  }
  for (const auto& g : ms.groups) {
    if (g.members.empty()) continue;
    out += "group " + g.name + " = {";
    for (std::size_t i = 0; i < g.members.size(); ++i) out += (i == 0 ? "" : ", ") + g.members[i];
    out += "};\n";
  }
  return out;
}

}  // namespace metriq::mdl
