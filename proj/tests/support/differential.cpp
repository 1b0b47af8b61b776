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

#include "differential.hpp"

#include <sstream>

#include "metriq/codegen/dialect.hpp"
#include "metriq/codegen/emit.hpp"
#include "metriq/driver.hpp"
#include "metriq/engine/adapter.hpp"
#include "metriq/engine/oracle.hpp"

namespace metriq::testing {

namespace {

template <typename F>
std::optional<ErrorCode> capture(F&& f, std::string& message) {
  try {
    f();
    return std::nullopt;
  } catch (const Error& e) {
    message = e.what();
    return e.code();
  }
}

void add_prefixed(std::vector<std::string>& out, const std::string& prefix, const std::vector<std::string>& in) {
  for (const auto& m : in) out.push_back(prefix + m);
}

}  // namespace

ThreeWay run_three_way(const synth::Case& c) {
  ThreeWay r;
  std::string msg_i, msg_o, msg_s;
  std::optional<Compiled> compiled;
  auto err_i = capture(
      [&] {
        compiled = compile_metrics(c.metrics_source, c.schema, c.config);
        r.interpreter = run_analysis(*compiled, c.data, c.config);
      },
      msg_i);
  auto err_o = capture([&] { r.oracle = brute_force_oracle(c.metrics_source, c.data, c.config); }, msg_o);
  if (err_i || err_o) {
    if (err_i != err_o)
      r.mismatches.push_back("interpreter error [" + msg_i + "] vs oracle error [" + msg_o + "]");
    r.error = err_i ? err_i : err_o;
    if (!compiled) return r;
  }
  auto err_s = capture(
      [&] {
        auto prog = codegen::emit(compiled->plan(), codegen::ansi_dialect(), c.config.table);
        r.program = prog.text;
        auto adapter = make_sqlite_adapter();
        auto rs = run_emitted(prog, *adapter, c.data, c.config.table);
        r.sql = assemble_scorecard(compiled->plan(), result_to_root_values(prog, rs, compiled->plan()),
                                   AssemblyOptions{c.config.max_segment_cardinality});
      },
      msg_s);
  if (err_s != err_i) {
    r.mismatches.push_back("interpreter error [" + msg_i + "] vs sql error [" + msg_s + "]");
    return r;
  }
  if (r.error) return r;
  add_prefixed(r.mismatches, "interpreter vs oracle: ", compare_scorecards(r.interpreter, r.oracle));
  add_prefixed(r.mismatches, "interpreter vs sql: ", compare_scorecards(r.interpreter, r.sql));
  return r;
}

std::string describe(const synth::Case& c) {
  std::ostringstream out;
  out << "seed " << c.seed << "\n--- metrics ---\n"
      << c.metrics_source << "--- config ---\n"
      << config_to_json(c.config).dump() << "\n--- data: " << c.data.row_count << " rows ---\n";
  return out.str();
}

}  // namespace metriq::testing
