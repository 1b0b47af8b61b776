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

#include "metriq/value.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace metriq {

std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::Null: return "null";
    case ValueType::Bool: return "bool";
    case ValueType::Number: return "number";
    case ValueType::String: return "string";
  }
  return "?";
}

Value Value::number(double d) {
  if (std::isnan(d)) return Value{};
  return Value{Storage{d}};
}

bool operator==(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return false;
  switch (a.type()) {
    case ValueType::Null: return true;
    case ValueType::Bool: return a.as_bool() == b.as_bool();
    case ValueType::Number: return a.as_number() == b.as_number();
    case ValueType::String: return a.as_string() == b.as_string();
  }
  return false;
}

int compare(const Value& a, const Value& b) {
  if (a.type() != b.type()) return a.type() < b.type() ? -1 : 1;
  switch (a.type()) {
    case ValueType::Null: return 0;
    case ValueType::Bool: return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
    case ValueType::Number: {
      double x = a.as_number(), y = b.as_number();
      return x < y ? -1 : (y < x ? 1 : 0);
    }
    case ValueType::String: {
      int c = a.as_string().compare(b.as_string());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return 0;
}

std::string format_number(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  if (d == 0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), end);
}

std::string to_display(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return "null";
    case ValueType::Bool: return v.as_bool() ? "true" : "false";
    case ValueType::Number: return format_number(v.as_number());
    case ValueType::String: return v.as_string();
  }
  return {};
}

}  // namespace metriq
