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

#include <array>
#include <filesystem>
#include <string>

#include "metriq/driver.hpp"
#include "metriq/engine/config.hpp"
#include "metriq/engine/dataset.hpp"

namespace metriq::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(METRIQ_FIXTURE_DIR) / name;
}

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// The website manifest: User, Revenue?, PageLoadTime?, Country, Browser, Variant.
DatasetSchema website_schema();
/// The two website metrics plus their unit and segments.
std::string website_metrics();

AnalysisConfig experiment_config(std::vector<std::string> segments = {});
AnalysisConfig business_config(std::vector<std::string> segments = {});

/// Rows of (User, Revenue, PageLoadTime, Country, Browser, Variant); empty
/// strings in the numeric fields are null.
Dataset website_rows(const std::vector<std::array<std::string, 6>>& rows);

/// A fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace metriq::testing
