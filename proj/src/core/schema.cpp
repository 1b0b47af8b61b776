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

#include "metriq/schema.hpp"

#include <set>
#include <string>

#include "metriq/error.hpp"

namespace metriq {

const ColumnSchema* DatasetSchema::find(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

std::size_t DatasetSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  return std::string::npos;
}

void DatasetSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.name.empty()) throw Error(ErrorCode::Config, "column with empty name in schema");
    if (c.type == ValueType::Null)
      throw Error(ErrorCode::Config, "column '" + c.name + "' must be number, string or bool");
    if (!seen.insert(c.name).second) throw Error(ErrorCode::Config, "duplicate column '" + c.name + "' in schema");
  }
  for (const auto& [unit, key] : units) {
    const ColumnSchema* col = find(key);
    if (!col) throw Error(ErrorCode::Config, "unit '" + unit + "' key column '" + key + "' is not a declared column");
    if (col->nullable)
      throw Error(ErrorCode::Config, "unit '" + unit + "' key column '" + key + "' must not be nullable");
  }
}

}  // namespace metriq
