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
#include <string>

#include "metriq/plan/plan.hpp"

namespace metriq::testing {

/// A plan whose single root is the lowered row expression `src`, over the
/// synthetic schema.
plan::MetricsPlan expression_plan(const std::string& src);

plan::NodeId only_root(const plan::MetricsPlan& p);

/// Swaps the operands of every commutative binary node, without canonicalizing.
plan::MetricsPlan mirror(const plan::MetricsPlan& p);

/// Canonical text of a subtree, independent of ids and hashes.
std::string structure(const plan::MetricsPlan& p, plan::NodeId id);

struct NormalizationCheck {
  std::size_t trees = 0;
  std::size_t rows_compared = 0;
  std::size_t distinct_hashes = 0;
  std::size_t not_idempotent = 0;
  std::size_t value_changes = 0;
  std::size_t mirror_mismatches = 0;
  std::size_t collisions = 0;
  std::string first_failure;

  bool ok() const { return !not_idempotent && !value_changes && !mirror_mismatches && !collisions; }
};

/// Random row expressions from `seed`: normalize must be idempotent, keep
/// every row value, give commutative mirror images the same hash, and never
/// give distinct canonical subtrees the same hash.
NormalizationCheck check_normalization(std::uint64_t seed, std::size_t trees);

}  // namespace metriq::testing
