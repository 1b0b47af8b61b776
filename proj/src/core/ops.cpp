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

#include "metriq/ops.hpp"

namespace metriq {

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

std::string_view to_string(AggKind kind) {
  switch (kind) {
    case AggKind::Sum: return "Sum";
    case AggKind::Avg: return "Avg";
    case AggKind::Count: return "Count";
    case AggKind::Min: return "Min";
    case AggKind::Max: return "Max";
    case AggKind::Percentile: return "Percentile";
    case AggKind::SumProduct: return "SumProduct";
  }
  return "?";
}

std::optional<AggKind> parse_agg_kind(std::string_view name) {
  if (name == "Sum") return AggKind::Sum;
  if (name == "Avg") return AggKind::Avg;
  if (name == "Count") return AggKind::Count;
  if (name == "Min") return AggKind::Min;
  if (name == "Max") return AggKind::Max;
  if (name == "Percentile") return AggKind::Percentile;
  return std::nullopt;
}

bool is_arithmetic(BinaryOp op) { return op <= BinaryOp::Div; }
bool is_comparison(BinaryOp op) { return op >= BinaryOp::Eq && op <= BinaryOp::Ge; }
bool is_logical(BinaryOp op) { return op == BinaryOp::And || op == BinaryOp::Or; }

bool is_commutative(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Mul:
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::And:
    case BinaryOp::Or: return true;
    default: return false;
  }
}

Value apply_unary(UnaryOp op, const Value& v) {
  if (v.is_null()) return v;
  if (op == UnaryOp::Neg) return v.is_number() ? Value::number(-v.as_number()) : Value::null();
  return v.is_bool() ? Value::boolean(!v.as_bool()) : Value::null();
}

namespace {

Value logical(BinaryOp op, const Value& a, const Value& b) {
  bool dominant = op == BinaryOp::Or;  // true dominates or, false dominates and
  if ((a.is_bool() && a.as_bool() == dominant) || (b.is_bool() && b.as_bool() == dominant))
    return Value::boolean(dominant);
  if (a.is_null() || b.is_null()) return Value::null();
  return Value::boolean(!dominant);
}

}  // namespace

Value apply_binary(BinaryOp op, const Value& a, const Value& b) {
  if (is_logical(op)) return logical(op, a, b);
  if (a.is_null() || b.is_null()) return Value::null();

  if (is_arithmetic(op)) {
    if (!a.is_number() || !b.is_number()) return Value::null();
    double x = a.as_number(), y = b.as_number();
    switch (op) {
      case BinaryOp::Add: return Value::number(x + y);
      case BinaryOp::Sub: return Value::number(x - y);
      case BinaryOp::Mul: return Value::number(x * y);
      case BinaryOp::Div: return y == 0 ? Value::null() : Value::number(x / y);
      default: break;
    }
  }

  int c = compare(a, b);
  switch (op) {
    case BinaryOp::Eq: return Value::boolean(c == 0);
    case BinaryOp::Ne: return Value::boolean(c != 0);
    case BinaryOp::Lt: return Value::boolean(c < 0);
    case BinaryOp::Le: return Value::boolean(c <= 0);
    case BinaryOp::Gt: return Value::boolean(c > 0);
    case BinaryOp::Ge: return Value::boolean(c >= 0);
    default: return Value::null();
  }
}

}  // namespace metriq
