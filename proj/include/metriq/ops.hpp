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

#include <cstdint>
#include <optional>
#include <string_view>

#include "metriq/value.hpp"

namespace metriq {

enum class UnaryOp : std::uint8_t { Neg, Not };

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

/// SumProduct is internal: it is produced by variance enrichment and has no
/// surface syntax.
enum class AggKind : std::uint8_t { Sum, Avg, Count, Min, Max, Percentile, SumProduct };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);  // surface token, e.g. "+" or "and"
std::string_view to_string(AggKind kind);
std::optional<AggKind> parse_agg_kind(std::string_view name);

bool is_arithmetic(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);
bool is_commutative(BinaryOp op);

/// Scalar evaluation shared by the interpreter and constant folding so that
/// folding can never change a result. SQL semantics: null propagates through
/// arithmetic and comparisons, and/or use three-valued logic, division by
/// zero and NaN results yield null.
Value apply_unary(UnaryOp op, const Value& v);
Value apply_binary(BinaryOp op, const Value& a, const Value& b);

/// A predicate selects a row only when it evaluates to true.
inline bool is_true(const Value& v) { return v.is_bool() && v.as_bool(); }

}  // namespace metriq
