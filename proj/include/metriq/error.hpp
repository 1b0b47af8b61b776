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

#include <stdexcept>
#include <string>
#include <string_view>

namespace metriq {

enum class ErrorCode {
  // user-facing
  Syntax,
  Type,
  UnknownGroup,
  UnknownMetric,
  EmptyRequest,
  UnknownUnit,
  InsufficientSample,
  UndefinedRatio,
  DegenerateVariance,
  UnsupportedConstruct,
  PlanNotFinalized,
  DuplicateDialect,
  IncompleteDialect,
  UnknownFabric,
  DataLoad,
  ContaminatedAssignment,
  SegmentCardinality,
  Config,
  Io,
  Adapter,
  // invariant breaches
  CycleDetected,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library. The code decides the CLI exit
/// status: invariant breaches map to 2, everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  bool is_internal() const { return code_ == ErrorCode::CycleDetected || code_ == ErrorCode::Internal; }

 private:
  ErrorCode code_;
};

}  // namespace metriq
