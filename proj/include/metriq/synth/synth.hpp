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

#include <cstdint>
#include <random>
#include <string>

#include "metriq/engine/config.hpp"
#include "metriq/engine/dataset.hpp"

namespace metriq::synth {

/// Deterministic across platforms: only raw mt19937_64 output is used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 gen_;
};

struct CaseLimits {
  std::size_t max_rows = 1000;
  std::size_t max_units = 50;
  std::size_t max_metrics = 8;
  std::size_t max_segments = 2;
};

/// A random metric set with a matching dataset and analysis config. Data
/// values are multiples of 1/4 so sums are exact in any order.
struct Case {
  std::uint64_t seed = 0;
  std::string metrics_source;
  DatasetSchema schema;
  Dataset data;
  AnalysisConfig config;
};

Case generate_case(std::uint64_t seed, const CaseLimits& limits = {});

/// Source text of a random row-level expression over the synthetic schema:
/// numeric when `boolean` is false. Used for normalization properties.
std::string random_row_expression(Rng& rng, int depth, bool boolean);

/// The manifest every generated case uses.
DatasetSchema synthetic_schema();

}  // namespace metriq::synth
