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

#include "metriq/codegen/dialect.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "metriq/error.hpp"

namespace metriq::codegen {

namespace {

std::string escape_with(const std::string& s, char quote) {
  std::string out;
  for (char c : s) {
    out += c;
    if (c == quote) out += c;
  }
  return out;
}

// Built-in dialects use the same descriptor format users supply.
constexpr const char* kAnsi = R"json({
  "name": "ansi",
  "description": "portable ANSI SQL subset",
  "capabilities": ["arithmetic", "comparison", "logic", "conditional", "null_test", "coalesce",
                   "sum", "count", "avg", "min", "max", "sum_product", "percentile_rank"],
  "types": {"number": "DOUBLE PRECISION", "string": "VARCHAR", "bool": "BOOLEAN"},
  "templates": {
    "ident": "\"{0}\"",
    "string": "'{0}'",
    "null": "NULL",
    "true": "TRUE",
    "false": "FALSE",
    "typed_null": "CAST(NULL AS {0})",
    "null_safe_eq": "({0} = {1} OR ({0} IS NULL AND {1} IS NULL))",
    "filtered": "CASE WHEN {1} THEN {0} END",
    "neg": "(- {0})",
    "not": "(NOT {0})",
    "add": "({0} + {1})",
    "sub": "({0} - {1})",
    "mul": "({0} * {1})",
    "div": "(CASE WHEN {1} = 0 OR {1} IS NULL THEN NULL ELSE {0} / {1} END)",
    "eq": "({0} = {1})",
    "ne": "({0} <> {1})",
    "lt": "({0} < {1})",
    "le": "({0} <= {1})",
    "gt": "({0} > {1})",
    "ge": "({0} >= {1})",
    "and": "({0} AND {1})",
    "or": "({0} OR {1})",
    "if": "(CASE WHEN {0} THEN {1} ELSE {2} END)",
    "is_null": "({0} IS NULL)",
    "coalesce": "COALESCE({0}, {1})",
    "sum": "COALESCE(SUM({0}), 0)",
    "count": "COUNT({0})",
    "count_rows": "COUNT(*)",
    "count_rows_filtered": "COUNT(CASE WHEN {0} THEN 1 END)",
    "avg": "AVG({0})",
    "min": "MIN({0})",
    "max": "MAX({0})",
    "sum_product": "COALESCE(SUM({0} * {1}), 0)",
    "rank_partition": "PARTITION BY {0}",
    "rank_row_number": "ROW_NUMBER() OVER ({0} ORDER BY {1})",
    "rank_count": "COUNT(*) OVER ({0})",
    "rank_pick": "MIN(CASE WHEN 100.0 * {0} >= {2} * {1} THEN {3} END)"
  }
})json";

constexpr const char* kWarehouse = R"json({
  "name": "warehouse",
  "description": "distributed warehouse SQL (Spark style)",
  "capabilities": ["arithmetic", "comparison", "logic", "conditional", "null_test", "coalesce",
                   "sum", "count", "avg", "min", "max", "sum_product", "percentile"],
  "types": {"number": "DOUBLE", "string": "STRING", "bool": "BOOLEAN"},
  "templates": {
    "ident": "`{0}`",
    "string": "'{0}'",
    "null": "NULL",
    "true": "true",
    "false": "false",
    "typed_null": "CAST(NULL AS {0})",
    "null_safe_eq": "({0} <=> {1})",
    "filtered": "CASE WHEN {1} THEN {0} END",
    "neg": "(- {0})",
    "not": "(NOT {0})",
    "add": "({0} + {1})",
    "sub": "({0} - {1})",
    "mul": "({0} * {1})",
    "div": "(CASE WHEN {1} = 0 OR {1} IS NULL THEN NULL ELSE {0} / {1} END)",
    "eq": "({0} = {1})",
    "ne": "({0} != {1})",
    "lt": "({0} < {1})",
    "le": "({0} <= {1})",
    "gt": "({0} > {1})",
    "ge": "({0} >= {1})",
    "and": "({0} AND {1})",
    "or": "({0} OR {1})",
    "if": "(CASE WHEN {0} THEN {1} ELSE {2} END)",
    "is_null": "isnull({0})",
    "coalesce": "nvl({0}, {1})",
    "sum": "nvl(sum({0}), 0)",
    "count": "count({0})",
    "count_rows": "count(1)",
    "count_rows_filtered": "count(CASE WHEN {0} THEN 1 END)",
    "avg": "avg({0})",
    "min": "min({0})",
    "max": "max({0})",
    "sum_product": "nvl(sum({0} * {1}), 0)",
    "percentile": "percentile_approx({0}, {1})"
  }
})json";

}  // namespace

const std::string& FabricDialect::tmpl(const std::string& key) const {
  auto it = templates.find(key);
  if (it == templates.end())
    throw Error(ErrorCode::UnsupportedConstruct, "dialect '" + name + "' has no template for '" + key + "'");
  return it->second;
}

std::string FabricDialect::render(const std::string& key, const std::vector<std::string>& args) const {
  const std::string& t = tmpl(key);
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '{') {
      std::size_t close = t.find('}', i);
      if (close != std::string::npos && close > i + 1 &&
          std::all_of(t.begin() + static_cast<std::ptrdiff_t>(i + 1), t.begin() + static_cast<std::ptrdiff_t>(close),
                      [](char c) { return c >= '0' && c <= '9'; })) {
        std::size_t idx = std::stoul(t.substr(i + 1, close - i - 1));
        if (idx >= args.size())
          throw Error(ErrorCode::Internal, "template '" + key + "' of dialect '" + name + "' uses {" +
                                               std::to_string(idx) + "} but got " + std::to_string(args.size()) +
                                               " arguments");
        out += args[idx];
        i = close;
        continue;
      }
    }
    out += t[i];
  }
  return out;
}

std::string FabricDialect::ident(const std::string& s) const {
  const std::string& t = tmpl("ident");
  return render("ident", {t.empty() ? s : escape_with(s, t.front())});
}

std::string FabricDialect::string_literal(const std::string& s) const {
  const std::string& t = tmpl("string");
  return render("string", {t.empty() ? s : escape_with(s, t.front())});
}

std::string FabricDialect::type_name(ValueType t) const {
  auto it = types.find(std::string(to_string(t)));
  if (it == types.end())
    throw Error(ErrorCode::UnsupportedConstruct, "dialect '" + name + "' has no type for '" +
                                                     std::string(to_string(t)) + "'");
  return it->second;
}

const std::map<std::string, std::vector<std::string>>& capability_templates() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"core", {"ident", "string", "null", "true", "false", "typed_null", "null_safe_eq", "filtered"}},
      {"arithmetic", {"neg", "add", "sub", "mul", "div"}},
      {"comparison", {"eq", "ne", "lt", "le", "gt", "ge"}},
      {"logic", {"and", "or", "not"}},
      {"conditional", {"if"}},
      {"null_test", {"is_null"}},
      {"coalesce", {"coalesce"}},
      {"sum", {"sum"}},
      {"count", {"count", "count_rows", "count_rows_filtered"}},
      {"avg", {"avg"}},
      {"min", {"min"}},
      {"max", {"max"}},
      {"sum_product", {"sum_product"}},
      {"percentile", {"percentile"}},
      {"percentile_rank", {"is_null", "rank_partition", "rank_row_number", "rank_count", "rank_pick"}},
  };
  return table;
}

void self_check(const FabricDialect& d) {
  if (d.name.empty()) throw Error(ErrorCode::IncompleteDialect, "dialect has no name");
  const auto& table = capability_templates();
  std::vector<std::string> problems;
  auto need = [&](const std::string& cap) {
    for (const auto& key : table.at(cap))
      if (!d.has(key)) problems.push_back("capability '" + cap + "' needs template '" + key + "'");
  };
  need("core");
  for (const auto& cap : d.capabilities) {
    if (!table.count(cap) || cap == "core")
      problems.push_back("unknown capability '" + cap + "'");
    else
      need(cap);
  }
  for (const char* t : {"number", "string", "bool"})
    if (!d.types.count(t)) problems.push_back("no type rendering for '" + std::string(t) + "'");
  if (problems.empty()) return;
  std::string msg = "dialect '" + d.name + "' is incomplete:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw Error(ErrorCode::IncompleteDialect, msg);
}

FabricDialect dialect_from_json(const nlohmann::json& j) {
  try {
    FabricDialect d;
    d.name = j.at("name").get<std::string>();
    d.description = j.value("description", "");
    d.templates = j.at("templates").get<std::map<std::string, std::string>>();
    for (const auto& c : j.at("capabilities")) d.capabilities.insert(c.get<std::string>());
    if (j.contains("types")) d.types = j.at("types").get<std::map<std::string, std::string>>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("invalid dialect descriptor: ") + e.what());
  }
}

nlohmann::json dialect_to_json(const FabricDialect& d) {
  return {{"name", d.name},
          {"description", d.description},
          {"capabilities", d.capabilities},
          {"types", d.types},
          {"templates", d.templates}};
}

FabricDialect load_dialect(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open dialect descriptor '" + path + "'");
  try {
    return dialect_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, "dialect descriptor '" + path + "': " + e.what());
  }
}

const FabricDialect& ansi_dialect() {
  static const FabricDialect d = dialect_from_json(nlohmann::json::parse(kAnsi));
  return d;
}

const FabricDialect& warehouse_dialect() {
  static const FabricDialect d = dialect_from_json(nlohmann::json::parse(kWarehouse));
  return d;
}

void DialectRegistry::register_dialect(FabricDialect d) {
  if (dialects_.count(d.name))
    throw Error(ErrorCode::DuplicateDialect, "dialect '" + d.name + "' is already registered");
  self_check(d);
  std::string name = d.name;
  dialects_.emplace(std::move(name), std::move(d));
}

const FabricDialect& DialectRegistry::get(const std::string& name) const {
  auto it = dialects_.find(name);
  if (it != dialects_.end()) return it->second;
  std::string list;
  for (const auto& n : names()) list += (list.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::UnknownFabric, "unknown fabric '" + name + "'; available: " + list);
}

std::vector<std::string> DialectRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, d] : dialects_) out.push_back(name);
  return out;
}

DialectRegistry DialectRegistry::with_builtins() {
  DialectRegistry r;
  r.register_dialect(ansi_dialect());
  r.register_dialect(warehouse_dialect());
  return r;
}

DialectRegistry DialectRegistry::from_environment() {
  DialectRegistry r = with_builtins();
  const char* dir = std::getenv("METRIQ_FABRIC_DIR");
  if (!dir || !*dir) return r;
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(ErrorCode::Config, "METRIQ_FABRIC_DIR '" + std::string(dir) + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) r.register_dialect(load_dialect(f.string()));
  return r;
}

}  // namespace metriq::codegen
