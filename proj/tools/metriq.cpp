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

// metriq: validate, compile, run and explain metric definitions.
//
// Exit status: 0 success, 1 user error, 2 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "metriq/codegen/dialect.hpp"
#include "metriq/codegen/emit.hpp"
#include "metriq/driver.hpp"
#include "metriq/error.hpp"
#include "metriq/frontend/parser.hpp"
#include "metriq/plan/build.hpp"

namespace fs = std::filesystem;
using namespace metriq;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

struct Inputs {
  AnalysisConfig cfg;
  DatasetSchema schema;
  Compiled compiled;
};

Inputs load_inputs(const std::string& metrics_path, const std::string& config_path) {
  AnalysisConfig cfg = load_config(config_path);
  if (cfg.manifest.empty()) throw Error(ErrorCode::Config, "config has no dataset.manifest");
  DatasetSchema schema = load_manifest(cfg.manifest);
  Compiled c = compile_metrics(read_file(metrics_path), schema, cfg, metrics_path);
  return {std::move(cfg), std::move(schema), std::move(c)};
}

void print_passes(std::ostream& out, const Compiled& c) {
  for (const auto& stage : c.pipeline.stages) {
    const auto& r = stage.report;
    out << "  " << r.pass << ": " << r.nodes_before << " -> " << r.nodes_after << " nodes";
    if (r.skipped) out << " (skipped" << (r.note.empty() ? "" : ": " + r.note) << ")";
    out << "\n";
  }
}

void print_estimators(std::ostream& out, const plan::MetricsPlan& p) {
  for (const auto& [metric, est] : p.estimators) out << metric << ": estimator: " << plan::to_string(est) << "\n";
}

int cmd_validate(const std::string& metrics_path, const std::string& manifest_path) {
  std::string source = read_file(metrics_path);
  auto parsed = mdl::parse_metric_set(source);
  std::vector<mdl::Diagnostic> diags = parsed.diagnostics;
  if (parsed.ok()) {
    if (manifest_path.empty()) {
      auto more = mdl::check_without_schema(*parsed.metric_set);
      diags.insert(diags.end(), more.begin(), more.end());
    } else {
      auto checked = mdl::type_check(std::make_shared<const mdl::MetricSet>(*parsed.metric_set),
                                     load_manifest(manifest_path));
      diags.insert(diags.end(), checked.diagnostics.begin(), checked.diagnostics.end());
    }
  }
  for (const auto& d : diags) std::cout << metrics_path << ":" << mdl::format(d) << "\n";
  if (mdl::has_errors(diags)) return 1;
  const auto& ms = *parsed.metric_set;
  std::size_t groups = 0;
  for (const auto& g : ms.groups) groups += g.members.empty() ? 0 : 1;
  std::cout << "OK: " << ms.metrics.size() << " metrics, " << ms.segments.size() << " segments, " << groups
            << " groups\n";
  return 0;
}

int cmd_compile(const std::string& metrics_path, const std::string& config_path, std::string fabric,
                const std::string& out_path) {
  Inputs in = load_inputs(metrics_path, config_path);
  if (fabric.empty()) fabric = in.cfg.fabric;
  auto registry = codegen::DialectRegistry::from_environment();
  const auto& dialect = registry.get(fabric);
  auto prog = codegen::emit(in.compiled.plan(), dialect, in.cfg.table);
  std::ostream& log = out_path.empty() ? std::cerr : std::cout;
  log << "passes:\n";
  print_passes(log, in.compiled);
  if (out_path.empty()) {
    std::cout << prog.text;
  } else {
    write_file(out_path, prog.text);
    std::cout << "wrote " << out_path << " (" << fabric << ", " << prog.columns.size() << " columns)\n";
  }
  return 0;
}

int cmd_run(const std::string& metrics_path, const std::string& config_path, const std::string& data_path,
            std::string out_path, std::string format) {
  Inputs in = load_inputs(metrics_path, config_path);
  Dataset ds = load_dataset(data_path, in.compiled.typed.schema);
  Scorecard sc = run_analysis(in.compiled, ds, in.cfg);
  if (out_path.empty()) out_path = in.cfg.output;
  if (format.empty()) format = fs::path(out_path).extension() == ".csv" ? "csv" : "json";
  std::cout << scorecard_summary(sc);
  if (out_path.empty()) {
    std::cout << "scorecard not written: pass --out or set output in the config\n";
    return 0;
  }
  write_file(out_path, format == "csv" ? scorecard_to_csv(sc) : scorecard_to_json(sc).dump(2) + "\n");
  std::cout << "wrote " << out_path << " (" << sc.rows.size() << " rows)\n";
  return 0;
}

int cmd_explain(const std::string& metrics_path, const std::string& config_path, bool passes,
                const std::string& dot_dir) {
  Inputs in = load_inputs(metrics_path, config_path);
  const Compiled& c = in.compiled;
  print_estimators(std::cout, c.plan());
  if (passes) {
    std::cout << "initial plan:\n" << plan::explain_json(c.initial).dump(2) << "\n";
    for (const auto& stage : c.pipeline.stages) {
      std::cout << "pass " << stage.report.pass << ":\n" << stage.report.to_json().dump(2) << "\n";
      std::cout << "plan after " << stage.report.pass << ":\n" << plan::explain_json(stage.after).dump(2) << "\n";
    }
  } else {
    std::cout << "plan:\n" << plan::explain_json(c.plan()).dump(2) << "\n";
  }
  if (!dot_dir.empty()) {
    write_file((fs::path(dot_dir) / "00_initial.dot").string(), plan::explain_dot(c.initial, "initial"));
    int i = 0;
    for (const auto& stage : c.pipeline.stages) {
      ++i;
      std::string prefix = (i < 10 ? "0" : "") + std::to_string(i) + "_";
      write_file((fs::path(dot_dir) / (prefix + stage.report.pass + ".dot")).string(),
                 plan::explain_dot(stage.after, stage.report.pass));
    }
    std::cout << "wrote " << (i + 1) << " DOT files to " << dot_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metriq: metric definitions compiled to plans, SQL and scorecards"};
  app.require_subcommand(1);

  std::string metrics, manifest, config, fabric, out, data, format, dot;
  bool passes = false;

  auto* validate = app.add_subcommand("validate", "parse and type-check a metric set");
  validate->add_option("--metrics", metrics, "metric set file")->required();
  validate->add_option("--manifest", manifest, "dataset manifest for type checking");

  auto* compile = app.add_subcommand("compile", "emit query text for a fabric");
  compile->add_option("--metrics", metrics, "metric set file")->required();
  compile->add_option("--config", config, "analysis config")->required();
  compile->add_option("--fabric", fabric, "dialect name (default: config fabric)");
  compile->add_option("--out", out, "output .sql file (default: stdout)");

  auto* run = app.add_subcommand("run", "compute a scorecard with the local interpreter");
  run->add_option("--metrics", metrics, "metric set file")->required();
  run->add_option("--config", config, "analysis config")->required();
  run->add_option("--data", data, "CSV or JSONL dataset")->required();
  run->add_option("--out", out, "scorecard file (default: config output)");
  run->add_option("--format", format, "json or csv (default: from --out extension)")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* explain = app.add_subcommand("explain", "print plans, pass reports and estimators");
  explain->add_option("--metrics", metrics, "metric set file")->required();
  explain->add_option("--config", config, "analysis config")->required();
  explain->add_flag("--passes", passes, "dump the plan after every pass");
  explain->add_option("--dot", dot, "directory for DOT graphs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*validate) return cmd_validate(metrics, manifest);
    if (*compile) return cmd_compile(metrics, config, fabric, out);
    if (*run) return cmd_run(metrics, config, data, out, format);
    if (*explain) return cmd_explain(metrics, config, passes, dot);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_internal() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
