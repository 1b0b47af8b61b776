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

#include <map>
#include <string>
#include <vector>

#include "metriq/value.hpp"

namespace metriq {

struct ColumnSchema {
  std::string name;
  ValueType type = ValueType::Number;  // Number, String or Bool
  bool nullable = false;
};

/// Declared shape of a dataset: typed columns plus unit-name -> key column.
struct DatasetSchema {
  std::vector<ColumnSchema> columns;
  std::map<std::string, std::string> units;

  const ColumnSchema* find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // npos when absent

  /// Throws Error(Config) on duplicate names, unknown unit key columns or
  /// nullable unit keys.
  void validate() const;
};

}  // namespace metriq
