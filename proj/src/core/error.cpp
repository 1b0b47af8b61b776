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

#include "metriq/error.hpp"

#include <cstdio>

#include "metriq/hash.hpp"

namespace metriq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::Type: return "type";
    case ErrorCode::UnknownGroup: return "unknown-group";
    case ErrorCode::UnknownMetric: return "unknown-metric";
    case ErrorCode::EmptyRequest: return "empty-request";
    case ErrorCode::UnknownUnit: return "unknown-unit";
    case ErrorCode::InsufficientSample: return "insufficient-sample";
    case ErrorCode::UndefinedRatio: return "undefined-ratio";
    case ErrorCode::DegenerateVariance: return "degenerate-variance";
    case ErrorCode::UnsupportedConstruct: return "unsupported-construct";
    case ErrorCode::PlanNotFinalized: return "plan-not-finalized";
    case ErrorCode::DuplicateDialect: return "duplicate-dialect";
    case ErrorCode::IncompleteDialect: return "incomplete-dialect";
    case ErrorCode::UnknownFabric: return "unknown-fabric";
    case ErrorCode::DataLoad: return "data-load";
    case ErrorCode::ContaminatedAssignment: return "contaminated-assignment";
    case ErrorCode::SegmentCardinality: return "segment-cardinality";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Adapter: return "adapter";
    case ErrorCode::CycleDetected: return "cycle-detected";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace metriq
