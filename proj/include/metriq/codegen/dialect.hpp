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
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/value.hpp"

namespace metriq::codegen {

/// A compute-fabric dialect expressed as data: op templates with positional
/// placeholders `{0}`, `{1}`, ... plus the capabilities it claims.
///
/// Template keys:
///   ident, string            quoting; the `quote` chars inside are doubled
///   null, true, false        literals
///   typed_null               {0} is a type from the type table
///   neg not add sub mul div eq ne lt le gt ge and or
///   if is_null coalesce null_safe_eq filtered
///   sum count count_rows count_rows_filtered avg min max sum_product
///   percentile                     aggregate form: {0} value, {1} fraction
///   rank_row_number rank_count     window forms: {0} partition clause, {1} value
///                                  (the partition always has at least one key)
///   rank_partition rank_pick       nearest-rank selection over a ranked subquery
struct FabricDialect {
  std::string name;
  std::string description;
  std::map<std::string, std::string> templates;
  std::set<std::string> capabilities;
  std::map<std::string, std::string> types;  // value type name -> SQL type

  bool has(const std::string& key) const { return templates.count(key) > 0; }
  const std::string& tmpl(const std::string& key) const;

  /// Substitutes `{i}` with args[i].
  std::string render(const std::string& key, const std::vector<std::string>& args) const;
  std::string ident(const std::string& name) const;
  std::string string_literal(const std::string& s) const;
  std::string type_name(ValueType t) const;
};

/// Templates each capability needs; "core" is required of every dialect.
const std::map<std::string, std::vector<std::string>>& capability_templates();

/// Throws IncompleteDialect naming every missing template.
void self_check(const FabricDialect& d);

FabricDialect dialect_from_json(const nlohmann::json& j);
nlohmann::json dialect_to_json(const FabricDialect& d);
FabricDialect load_dialect(const std::string& path);

const FabricDialect& ansi_dialect();
const FabricDialect& warehouse_dialect();

class DialectRegistry {
 public:
  /// Throws DuplicateDialect or IncompleteDialect.
  void register_dialect(FabricDialect d);
  /// Throws UnknownFabric listing the available names.
  const FabricDialect& get(const std::string& name) const;
  bool contains(const std::string& name) const { return dialects_.count(name) > 0; }
  std::vector<std::string> names() const;

  /// ansi and warehouse.
  static DialectRegistry with_builtins();
  /// Builtins plus every `*.json` descriptor in `$METRIQ_FABRIC_DIR`, in
  /// file name order.
  static DialectRegistry from_environment();

 private:
  std::map<std::string, FabricDialect> dialects_;
};

}  // namespace metriq::codegen
