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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "metriq/ops.hpp"
#include "metriq/value.hpp"

namespace metriq {
namespace {

const Value N = Value::null();
const Value T = Value::boolean(true);
const Value F = Value::boolean(false);
Value num(double d) { return Value::number(d); }

TEST(Value, NullPropagatesThroughArithmeticAndComparison) {
  for (BinaryOp op : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Lt, BinaryOp::Eq}) {
    EXPECT_TRUE(apply_binary(op, N, num(1)).is_null()) << to_string(op);
    EXPECT_TRUE(apply_binary(op, num(1), N).is_null()) << to_string(op);
  }
  EXPECT_TRUE(apply_unary(UnaryOp::Neg, N).is_null());
  EXPECT_TRUE(apply_unary(UnaryOp::Not, N).is_null());
}

TEST(Value, DivisionByZeroIsNull) {
  EXPECT_TRUE(apply_binary(BinaryOp::Div, num(1), num(0)).is_null());
  EXPECT_TRUE(apply_binary(BinaryOp::Div, num(0), num(0)).is_null());
  EXPECT_EQ(apply_binary(BinaryOp::Div, num(7), num(2)), num(3.5));
}

TEST(Value, KleeneLogic) {
  EXPECT_EQ(apply_binary(BinaryOp::And, F, N), F);
  EXPECT_EQ(apply_binary(BinaryOp::And, N, F), F);
  EXPECT_TRUE(apply_binary(BinaryOp::And, T, N).is_null());
  EXPECT_EQ(apply_binary(BinaryOp::Or, T, N), T);
  EXPECT_EQ(apply_binary(BinaryOp::Or, N, T), T);
  EXPECT_TRUE(apply_binary(BinaryOp::Or, F, N).is_null());
  EXPECT_EQ(apply_unary(UnaryOp::Not, T), F);
}

TEST(Value, ComparisonsOnStrings) {
  EXPECT_EQ(apply_binary(BinaryOp::Lt, Value::string("DE"), Value::string("US")), T);
  EXPECT_EQ(apply_binary(BinaryOp::Eq, Value::string("US"), Value::string("US")), T);
  EXPECT_EQ(apply_binary(BinaryOp::Ne, T, F), T);
}

TEST(Value, NegativeZeroEqualsZero) {
  EXPECT_EQ(num(-0.0), num(0.0));
  EXPECT_EQ(compare(num(-0.0), num(0.0)), 0);
}

TEST(Value, TotalOrderAcrossTypes) {
  EXPECT_LT(compare(N, F), 0);
  EXPECT_LT(compare(T, num(-1e300)), 0);
  EXPECT_LT(compare(num(1e300), Value::string("")), 0);
  EXPECT_LT(compare(Value::string("a"), Value::string("b")), 0);
}

TEST(Value, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(5), "5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  for (double d : {1.0 / 3, 1e-300, 123456789.123, 2.0 / 7e20, -0.000123}) {
    EXPECT_EQ(std::strtod(format_number(d).c_str(), nullptr), d) << format_number(d);
  }
}

TEST(Value, NanIsNull) {
  EXPECT_TRUE(num(std::numeric_limits<double>::quiet_NaN()).is_null());
  double inf = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(apply_binary(BinaryOp::Mul, num(inf), num(0)).is_null());
}

}  // namespace
}  // namespace metriq
