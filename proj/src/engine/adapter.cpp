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

#include "metriq/engine/adapter.hpp"

#include <sqlite3.h>

#include "metriq/error.hpp"

namespace metriq {

namespace {

class SqliteAdapter final : public EngineAdapter {
 public:
  SqliteAdapter() {
    if (sqlite3_open(":memory:", &db_) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(ErrorCode::Adapter, "sqlite: cannot open database: " + msg);
    }
    // Without this, a double-quoted name that is not a column becomes a string literal.
    sqlite3_db_config(db_, SQLITE_DBCONFIG_DQS_DML, 0, nullptr);
    sqlite3_db_config(db_, SQLITE_DBCONFIG_DQS_DDL, 0, nullptr);
  }
  ~SqliteAdapter() override { sqlite3_close(db_); }
  SqliteAdapter(const SqliteAdapter&) = delete;
  SqliteAdapter& operator=(const SqliteAdapter&) = delete;

  std::string dialect() const override { return "ansi"; }

  void load_table(const std::string& name, const Dataset& ds) override {
    std::string create = "CREATE TABLE " + quote(name) + " (";
    std::string insert = "INSERT INTO " + quote(name) + " VALUES (";
    for (std::size_t i = 0; i < ds.schema.columns.size(); ++i) {
      const auto& c = ds.schema.columns[i];
      create += (i ? ", " : "") + quote(c.name) + (c.type == ValueType::String ? " TEXT" : " REAL");
      insert += i ? ", ?" : "?";
    }
    exec("DROP TABLE IF EXISTS " + quote(name));
    exec(create + ")");
    exec("BEGIN");
    sqlite3_stmt* stmt = prepare(insert + ")");
    for (std::size_t r = 0; r < ds.row_count; ++r) {
      for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        const Value& v = ds.columns[c][r];
        int idx = static_cast<int>(c + 1);
        switch (v.type()) {
          case ValueType::Null: sqlite3_bind_null(stmt, idx); break;
          case ValueType::Bool: sqlite3_bind_int(stmt, idx, v.as_bool() ? 1 : 0); break;
          case ValueType::Number: sqlite3_bind_double(stmt, idx, v.as_number()); break;
          case ValueType::String:
            sqlite3_bind_text(stmt, idx, v.as_string().data(), static_cast<int>(v.as_string().size()),
                              SQLITE_TRANSIENT);
            break;
        }
      }
      if (sqlite3_step(stmt) != SQLITE_DONE) fail(stmt, insert);
      sqlite3_reset(stmt);
    }
    sqlite3_finalize(stmt);
    exec("COMMIT");
  }

  ResultSet execute(const std::string& sql) override {
    sqlite3_stmt* stmt = prepare(sql);
    ResultSet rs;
    int ncol = sqlite3_column_count(stmt);
    for (int i = 0; i < ncol; ++i) rs.columns.emplace_back(sqlite3_column_name(stmt, i));
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
      std::vector<Value> row;
      for (int i = 0; i < ncol; ++i) {
        switch (sqlite3_column_type(stmt, i)) {
          case SQLITE_NULL: row.push_back(Value::null()); break;
          case SQLITE_INTEGER:
            row.push_back(Value::number(static_cast<double>(sqlite3_column_int64(stmt, i))));
            break;
          case SQLITE_FLOAT: row.push_back(Value::number(sqlite3_column_double(stmt, i))); break;
          default: {
            const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, i));
            row.push_back(Value::string(std::string(text, static_cast<std::size_t>(sqlite3_column_bytes(stmt, i)))));
          }
        }
      }
      rs.rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) fail(stmt, sql);
    sqlite3_finalize(stmt);
    return rs;
  }

 private:
  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  }

  [[noreturn]] void fail(sqlite3_stmt* stmt, const std::string& sql) {
    std::string msg = sqlite3_errmsg(db_);
    sqlite3_finalize(stmt);
    throw Error(ErrorCode::Adapter, "sqlite: " + msg + "\n--- program ---\n" + sql);
  }

  sqlite3_stmt* prepare(const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), static_cast<int>(sql.size()), &stmt, nullptr) != SQLITE_OK)
      fail(stmt, sql);
    return stmt;
  }

  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(ErrorCode::Adapter, "sqlite: " + msg + "\n--- program ---\n" + sql);
    }
  }

  sqlite3* db_ = nullptr;
};

}  // namespace

std::unique_ptr<EngineAdapter> make_sqlite_adapter() { return std::make_unique<SqliteAdapter>(); }

ResultSet run_emitted(const codegen::EmittedProgram& prog, EngineAdapter& adapter, const Dataset& ds,
                      const std::string& table) {
  if (prog.dialect != adapter.dialect())
    throw Error(ErrorCode::Adapter, "adapter runs dialect '" + adapter.dialect() + "', program is '" +
                                        prog.dialect + "'");
  adapter.load_table(table, ds);
  ResultSet rs = adapter.execute(prog.text);
  if (rs.columns.size() != prog.columns.size())
    throw Error(ErrorCode::Adapter, "result has " + std::to_string(rs.columns.size()) + " columns, program declares " +
                                        std::to_string(prog.columns.size()) + "\n--- program ---\n" + prog.text);
  for (std::size_t c = 0; c < prog.columns.size(); ++c) {
    if (rs.columns[c] != prog.columns[c].name)
      throw Error(ErrorCode::Adapter, "result column '" + rs.columns[c] + "' where '" + prog.columns[c].name +
                                          "' was declared\n--- program ---\n" + prog.text);
    if (prog.columns[c].type != ValueType::Bool) continue;
    for (auto& row : rs.rows)
      if (row[c].is_number()) row[c] = Value::boolean(row[c].as_number() != 0);
  }
  return rs;
}

RootValues result_to_root_values(const codegen::EmittedProgram& prog, const ResultSet& rs,
                                 const plan::MetricsPlan& p) {
  using Kind = codegen::OutputColumn::Kind;
  std::map<std::string, std::vector<std::string>> set_segments;
  for (const auto& s : p.slice_sets) set_segments[s.id] = s.segments;

  RootValues out;
  for (const auto& [key, id] : p.roots) out[key];
  for (const auto& row : rs.rows) {
    std::string slice;
    std::optional<Value> variant;
    std::map<std::string, Value> segs;
    for (std::size_t c = 0; c < prog.columns.size(); ++c) {
      const auto& col = prog.columns[c];
      if (col.kind == Kind::Slice) slice = row[c].is_string() ? row[c].as_string() : std::string();
      if (col.kind == Kind::Variant) variant = row[c];
      if (col.kind == Kind::Segment) segs[col.segment] = row[c];
    }
    auto it = set_segments.find(slice);
    if (it == set_segments.end()) throw Error(ErrorCode::Adapter, "result row for unknown slice '" + slice + "'");
    std::vector<Value> group;
    if (variant) group.push_back(*variant);
    for (const auto& s : it->second) group.push_back(segs[s]);
    for (std::size_t c = 0; c < prog.columns.size(); ++c) {
      const auto& col = prog.columns[c];
      if (col.kind != Kind::Metric && col.kind != Kind::Moment) continue;
      plan::RootKey key{col.metric, slice, col.role};
      if (!p.roots.count(key)) continue;
      out[key][group] = row[c];
    }
  }
  return out;
}

}  // namespace metriq
