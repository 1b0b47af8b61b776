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

#include "util.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "metriq/error.hpp"

namespace metriq::testing {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

DatasetSchema website_schema() { return load_manifest(fixture("website.manifest.json")); }

std::string website_metrics() { return read_text(fixture("website.mdl")); }

AnalysisConfig experiment_config(std::vector<std::string> segments) {
  AnalysisConfig cfg;
  cfg.mode = Mode::Experiment;
  cfg.assignment_column = "Variant";
  cfg.randomization_unit = "User";
  cfg.segments.segments = std::move(segments);
  return cfg;
}

AnalysisConfig business_config(std::vector<std::string> segments) {
  AnalysisConfig cfg;
  cfg.mode = Mode::Business;
  cfg.segments.segments = std::move(segments);
  return cfg;
}

Dataset website_rows(const std::vector<std::array<std::string, 6>>& rows) {
  std::ostringstream csv;
  csv << "User,Revenue,PageLoadTime,Country,Browser,Variant\n";
  for (const auto& r : rows) csv << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << ',' << r[5] << '\n';
  std::istringstream in(csv.str());
  return read_csv(in, website_schema());
}

std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("metriq-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace metriq::testing
