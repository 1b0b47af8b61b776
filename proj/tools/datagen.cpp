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

// metriq-datagen: writes one seeded random case (metric set, manifest,
// dataset, config) into a directory, ready for `metriq run`.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "metriq/engine/config.hpp"
#include "metriq/engine/dataset.hpp"
#include "metriq/error.hpp"
#include "metriq/synth/synth.hpp"

namespace fs = std::filesystem;
using namespace metriq;

namespace {

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metriq-datagen: seeded random metric sets and datasets"};
  std::uint64_t seed = 1;
  std::string dir;
  synth::CaseLimits limits;
  app.add_option("--seed", seed, "random seed")->required();
  app.add_option("--out", dir, "output directory")->required();
  app.add_option("--max-rows", limits.max_rows, "row limit")->check(CLI::PositiveNumber);
  app.add_option("--max-units", limits.max_units, "unit limit")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    synth::Case c = synth::generate_case(seed, limits);
    fs::create_directories(dir);
    fs::path out(dir);
    write(out / "metrics.mdl", c.metrics_source);
    write(out / "manifest.json", manifest_to_json(c.schema).dump(2) + "\n");
    std::ostringstream csv;
    write_csv(csv, c.data);
    write(out / "data.csv", csv.str());
    AnalysisConfig cfg = c.config;
    cfg.manifest = "manifest.json";
    write(out / "config.json", config_to_json(cfg).dump(2) + "\n");
    std::cout << "seed " << seed << ": " << c.data.row_count << " rows written to " << dir << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_internal() ? 2 : 1;
  }
  return 0;
}
