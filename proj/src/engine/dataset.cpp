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

#include "metriq/engine/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "metriq/error.hpp"

namespace metriq {

const std::vector<Value>& Dataset::column(const std::string& name) const {
  std::size_t i = schema.index_of(name);
  if (i == std::string::npos) throw Error(ErrorCode::DataLoad, "dataset has no column '" + name + "'");
  return columns[i];
}

namespace {

ValueType parse_type(const std::string& s) {
  if (s == "number") return ValueType::Number;
  if (s == "string") return ValueType::String;
  if (s == "bool") return ValueType::Bool;
  throw Error(ErrorCode::Config, "unknown column type '" + s + "' (expected number, string or bool)");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double d = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(d)) return std::nullopt;
  return d;
}

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "TRUE" || s == "True" || s == "1") return true;
  if (s == "false" || s == "FALSE" || s == "False" || s == "0") return false;
  return std::nullopt;
}

[[noreturn]] void cell_error(const std::string& source, std::size_t line, const std::string& col,
                             const std::string& what) {
  throw Error(ErrorCode::DataLoad, source + ": line " + std::to_string(line) + ", column '" + col + "': " + what);
}

struct CsvField {
  std::string text;
  bool quoted = false;
};

// RFC 4180 records; quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  std::size_t line() const { return record_line_; }

  bool next(std::vector<CsvField>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_;
    CsvField field;
    bool in_quotes = false;
    for (;; c = in_.get()) {
      if (in_quotes) {
        if (c == EOF) throw Error(ErrorCode::DataLoad, "line " + std::to_string(record_line_) + ": unterminated quote");
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.text += '"';
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.text += static_cast<char>(c);
        }
        continue;
      }
      if (c == EOF || c == '\n') {
        if (!field.text.empty() && field.text.back() == '\r' && !field.quoted) field.text.pop_back();
        fields.push_back(std::move(field));
        ++line_;
        return true;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field = {};
      } else if (c == '"' && field.text.empty() && !field.quoted) {
        in_quotes = true;
        field.quoted = true;
      } else if (c == '\r' && field.quoted && in_.peek() == '\n') {
        // trailing CR after a quoted field
      } else {
        field.text += static_cast<char>(c);
      }
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

Dataset empty_dataset(const DatasetSchema& schema) {
  schema.validate();
  Dataset ds;
  ds.schema = schema;
  ds.columns.resize(schema.columns.size());
  return ds;
}

}  // namespace

DatasetSchema parse_manifest(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array())
    throw Error(ErrorCode::Config, "manifest must be an object with a 'columns' array");
  DatasetSchema schema;
  try {
    for (const auto& c : j["columns"]) {
      ColumnSchema col;
      col.name = c.at("name").get<std::string>();
      col.type = parse_type(c.at("type").get<std::string>());
      col.nullable = c.value("nullable", false);
      schema.columns.push_back(std::move(col));
    }
    if (j.contains("units"))
      for (const auto& [unit, key] : j["units"].items()) schema.units[unit] = key.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed manifest: ") + e.what());
  }
  schema.validate();
  return schema;
}

DatasetSchema load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
  return parse_manifest(j);
}

nlohmann::json manifest_to_json(const DatasetSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns)
    cols.push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}, {"nullable", c.nullable}});
  nlohmann::json units = nlohmann::json::object();
  for (const auto& [u, k] : schema.units) units[u] = k;
  return {{"columns", cols}, {"units", units}};
}

Dataset read_csv(std::istream& in, const DatasetSchema& schema, const std::string& source) {
  Dataset ds = empty_dataset(schema);
  CsvReader reader(in);
  std::vector<CsvField> header;
  if (!reader.next(header)) throw Error(ErrorCode::DataLoad, source + ": missing header row");

  // file position of each schema column
  std::vector<std::size_t> position(schema.columns.size(), std::string::npos);
  for (std::size_t f = 0; f < header.size(); ++f) {
    std::size_t i = schema.index_of(header[f].text);
    if (i != std::string::npos) position[i] = f;
  }
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    if (position[i] == std::string::npos)
      throw Error(ErrorCode::DataLoad, source + ": declared column '" + schema.columns[i].name + "' is missing");

  std::vector<CsvField> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted) continue;  // blank line
    std::size_t line = reader.line();
    if (fields.size() != header.size())
      throw Error(ErrorCode::DataLoad, source + ": line " + std::to_string(line) + ": expected " +
                                           std::to_string(header.size()) + " fields, found " +
                                           std::to_string(fields.size()));
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      const ColumnSchema& col = schema.columns[i];
      const CsvField& f = fields[position[i]];
      Value v;
      if (f.text.empty() && !f.quoted) {
        if (!col.nullable) cell_error(source, line, col.name, "null in non-nullable column");
      } else if (col.type == ValueType::Number) {
        auto d = parse_number(f.text);
        if (!d) cell_error(source, line, col.name, "cannot convert \"" + f.text + "\" to number");
        v = Value::number(*d);
      } else if (col.type == ValueType::Bool) {
        auto b = parse_bool(f.text);
        if (!b) cell_error(source, line, col.name, "cannot convert \"" + f.text + "\" to bool");
        v = Value::boolean(*b);
      } else {
        v = Value::string(f.text);
      }
      ds.columns[i].push_back(std::move(v));
    }
    ++ds.row_count;
  }
  return ds;
}

Dataset read_jsonl(std::istream& in, const DatasetSchema& schema, const std::string& source) {
  Dataset ds = empty_dataset(schema);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::DataLoad, source + ": line " + std::to_string(line) + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::DataLoad, source + ": line " + std::to_string(line) + ": not an object");
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      const ColumnSchema& col = schema.columns[i];
      auto it = obj.find(col.name);
      Value v;
      if (it == obj.end() || it->is_null()) {
        if (!col.nullable) cell_error(source, line, col.name, "null in non-nullable column");
      } else if (col.type == ValueType::Number) {
        if (!it->is_number()) cell_error(source, line, col.name, "expected number, found " + it->dump());
        v = Value::number(it->get<double>());
      } else if (col.type == ValueType::Bool) {
        if (!it->is_boolean()) cell_error(source, line, col.name, "expected bool, found " + it->dump());
        v = Value::boolean(it->get<bool>());
      } else {
        if (!it->is_string()) cell_error(source, line, col.name, "expected string, found " + it->dump());
        v = Value::string(it->get<std::string>());
      }
      ds.columns[i].push_back(std::move(v));
    }
    ++ds.row_count;
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return read_jsonl(in, schema, path.string());
  return read_csv(in, schema, path.string());
}

namespace {

std::string csv_field(const Value& v) {
  if (v.is_null()) return {};
  std::string s = to_display(v);
  if (v.is_string() && (s.empty() || s.find_first_of(",\"\n\r") != std::string::npos)) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& ds) {
  for (std::size_t i = 0; i < ds.schema.columns.size(); ++i) out << (i ? "," : "") << ds.schema.columns[i].name;
  out << '\n';
  for (std::size_t r = 0; r < ds.row_count; ++r) {
    for (std::size_t i = 0; i < ds.columns.size(); ++i) out << (i ? "," : "") << csv_field(ds.columns[i][r]);
    out << '\n';
  }
}

void check_conformance(const Dataset& ds) {
  if (ds.columns.size() != ds.schema.columns.size())
    throw Error(ErrorCode::DataLoad, "dataset column count does not match its schema");
  for (std::size_t i = 0; i < ds.columns.size(); ++i) {
    const ColumnSchema& col = ds.schema.columns[i];
    if (ds.columns[i].size() != ds.row_count)
      throw Error(ErrorCode::DataLoad, "column '" + col.name + "' has " + std::to_string(ds.columns[i].size()) +
                                           " values for " + std::to_string(ds.row_count) + " rows");
    for (std::size_t r = 0; r < ds.row_count; ++r) {
      const Value& v = ds.columns[i][r];
      if (v.is_null() ? !col.nullable : v.type() != col.type)
        throw Error(ErrorCode::DataLoad, "row " + std::to_string(r + 1) + ", column '" + col.name +
                                             "': value does not conform to the schema");
    }
  }
}

}  // namespace metriq
