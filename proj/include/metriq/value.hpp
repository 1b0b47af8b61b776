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
#include <string>
#include <string_view>
#include <variant>

namespace metriq {

enum class ValueType : std::uint8_t { Null, Bool, Number, String };

std::string_view to_string(ValueType t);

/// A dynamically typed scalar: the cell type of datasets, literals and
/// grouping keys. Numbers are IEEE-754 binary64.
class Value {
 public:
  Value() = default;

  static Value null() { return Value{}; }
  static Value boolean(bool b) { return Value{Storage{b}}; }
  static Value number(double d);
  static Value string(std::string s) { return Value{Storage{std::move(s)}}; }

  ValueType type() const { return static_cast<ValueType>(data_.index()); }
  bool is_null() const { return data_.index() == 0; }
  bool is_bool() const { return data_.index() == 1; }
  bool is_number() const { return data_.index() == 2; }
  bool is_string() const { return data_.index() == 3; }

  bool as_bool() const { return std::get<bool>(data_); }
  double as_number() const { return std::get<double>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }

  /// Exact identity: type and payload bits (with -0 == +0).
  friend bool operator==(const Value& a, const Value& b);

 private:
  using Storage = std::variant<std::monostate, bool, double, std::string>;
  explicit Value(Storage s) : data_(std::move(s)) {}
  Storage data_;
};

/// Total order used for grouping keys and deterministic output:
/// null < bool < number < string.
int compare(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare(a, b) < 0; }
};

/// Shortest representation that round-trips through strtod.
std::string format_number(double d);

/// Human-oriented rendering used in slice keys and tables.
std::string to_display(const Value& v);

}  // namespace metriq
