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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "metriq/schema.hpp"
#include "metriq/value.hpp"

namespace metriq {

/// In-memory columnar table. Immutable once loaded.
struct Dataset {
  DatasetSchema schema;
  std::vector<std::vector<Value>> columns;  // parallel to schema.columns
  std::size_t row_count = 0;

  const std::vector<Value>& column(const std::string& name) const;
};

/// {"columns": [{"name", "type", "nullable"}], "units": {"User": "UserId"}}
DatasetSchema parse_manifest(const nlohmann::json& j);
DatasetSchema load_manifest(const std::filesystem::path& path);
nlohmann::json manifest_to_json(const DatasetSchema& schema);

/// CSV with a header row, or JSONL (one object per line) when the file
/// extension is .jsonl or .ndjson. Columns not in the schema are ignored.
Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema);

/// An unquoted empty field is null; `""` is the empty string.
Dataset read_csv(std::istream& in, const DatasetSchema& schema, const std::string& source = "<csv>");
Dataset read_jsonl(std::istream& in, const DatasetSchema& schema, const std::string& source = "<jsonl>");

void write_csv(std::ostream& out, const Dataset& ds);

/// Throws Error(DataLoad) unless columns are complete and conform to the
/// schema's types and nullability.
void check_conformance(const Dataset& ds);

}  // namespace metriq
