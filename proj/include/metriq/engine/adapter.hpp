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

#include <memory>
#include <string>
#include <vector>

#include "metriq/codegen/emit.hpp"
#include "metriq/engine/dataset.hpp"
#include "metriq/engine/scorecard.hpp"

namespace metriq {

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

/// An embedded relational engine that can hold a dataset as a table and run
/// emitted query text against it.
class EngineAdapter {
 public:
  virtual ~EngineAdapter() = default;
  virtual std::string dialect() const = 0;
  virtual void load_table(const std::string& name, const Dataset& ds) = 0;
  /// Throws Adapter with the engine's message and the program text.
  virtual ResultSet execute(const std::string& sql) = 0;
};

/// In-memory SQLite database; runs the `ansi` dialect.
std::unique_ptr<EngineAdapter> make_sqlite_adapter();

/// Loads `ds` as `table`, executes the program and converts the result to
/// its declared output schema: integer cells become numbers and bool
/// columns become bools.
ResultSet run_emitted(const codegen::EmittedProgram& prog, EngineAdapter& adapter, const Dataset& ds,
                      const std::string& table = "events");

/// Regroups an emitted program's result into per-root group values.
RootValues result_to_root_values(const codegen::EmittedProgram& prog, const ResultSet& rs,
                                 const plan::MetricsPlan& p);

}  // namespace metriq
