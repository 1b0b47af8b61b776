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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "metriq/ops.hpp"
#include "metriq/schema.hpp"
#include "metriq/value.hpp"

namespace metriq::plan {

using NodeId = std::uint32_t;

enum class Op : std::uint8_t {
  Column,
  Literal,
  Unary,
  Binary,
  Conditional,
  IsNull,
  Coalesce,
  Aggregation,
  GroupedAggregation,
};

std::string_view to_string(Op op);

struct AggLevel {
  enum class Tag : std::uint8_t { Row, Unit, Population };
  Tag tag = Tag::Row;
  std::string unit;

  static AggLevel row() { return {}; }
  static AggLevel population() { return {Tag::Population, {}}; }
  static AggLevel of_unit(std::string u) { return {Tag::Unit, std::move(u)}; }

  bool is_row() const { return tag == Tag::Row; }
  std::string to_string() const;
  friend bool operator==(const AggLevel&, const AggLevel&) = default;
};

/// One DAG node. Aggregation children are laid out as
/// [args...][filter?][keys...]; plain Aggregation nodes have no keys and
/// group implicitly (by the unit key for Unit level, not at all for
/// Population level).
struct PlanNode {
  Op op = Op::Literal;
  std::vector<NodeId> children;
  AggLevel level;
  std::optional<ValueType> type;  // nullopt when unknown
  bool nullable = true;

  std::string column;  // Column
  Value literal;       // Literal
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  AggKind agg = AggKind::Sum;
  std::optional<double> rank;
  std::uint8_t arg_count = 0;
  bool has_filter = false;

  std::uint64_t hash = 0;  // structural, filled by MetricsPlan

  bool is_aggregation() const { return op == Op::Aggregation || op == Op::GroupedAggregation; }
  std::optional<NodeId> arg(std::size_t i = 0) const;
  std::optional<NodeId> filter() const;
  std::vector<NodeId> keys() const;
};

enum class Estimator : std::uint8_t { Standard, DeltaRatio, Unsupported };
std::string_view to_string(Estimator e);

enum class Role : std::uint8_t { Value, N, SumV, SumV2, SumY, SumX, SumY2, SumX2, SumXY };
std::string_view to_string(Role r);

inline constexpr const char* kUnslicedId = "";
inline constexpr const char* kOverallId = "(all)";

struct RootKey {
  std::string metric;
  std::string slice;  // "" before segmentation, then a SliceSet id
  Role role = Role::Value;

  auto operator<=>(const RootKey&) const = default;
};

/// A set of segments the population is split by; the overall slice has no
/// segments.
struct SliceSet {
  std::string id;  // "(all)", "Country", "Country,Browser"
  std::vector<std::string> segments;
};

struct Assignment {
  std::string column;
  std::string treatment;
  std::string control;
};

/// Fabric-agnostic DAG. Nodes are hash-consed: interning a node equal to an
/// existing one returns the existing id.
class MetricsPlan {
 public:
  const PlanNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<PlanNode>& nodes() const { return nodes_; }

  NodeId intern(PlanNode n);
  /// Appends without deduplication; used to construct non-canonical inputs.
  NodeId append_raw(PlanNode n);

  // Node constructors.
  NodeId column(const std::string& name);
  NodeId literal(Value v);
  NodeId unary(UnaryOp op, NodeId operand);
  NodeId binary(BinaryOp op, NodeId lhs, NodeId rhs);
  NodeId conditional(NodeId c, NodeId t, NodeId e);
  NodeId is_null(NodeId operand);
  NodeId coalesce(NodeId value, NodeId fallback);
  NodeId aggregation(AggKind kind, AggLevel level, std::vector<NodeId> args, std::optional<NodeId> filter,
                     std::optional<double> rank = std::nullopt);
  NodeId grouped(AggKind kind, AggLevel level, std::vector<NodeId> args, std::optional<NodeId> filter,
                 std::vector<NodeId> keys, std::optional<double> rank = std::nullopt);

  std::map<RootKey, NodeId> roots;
  std::map<std::string, Estimator> estimators;

  // Analysis context.
  DatasetSchema schema;
  std::optional<Assignment> assignment;  // set in experiment mode
  bool experiment() const { return assignment.has_value(); }
  std::string randomization_unit;
  std::vector<std::string> requested;  // metric names
  std::vector<SliceSet> slice_sets;
  std::map<std::string, NodeId> segment_nodes;  // consumed by segmentation
  std::uint64_t config_digest = 0;

  /// True once every root is a GroupedAggregation.
  bool finalized() const;
  /// Digest over node hashes, roots and context; independent of node ids.
  std::uint64_t digest() const;

  /// Ids reachable from roots and segment nodes.
  std::vector<bool> reachable() const;

 private:
  void fill(PlanNode& n) const;
  std::string key_of(const PlanNode& n) const;

  std::vector<PlanNode> nodes_;
  std::unordered_map<std::string, NodeId> index_;
};

/// Children before parents; ties broken by structural hash, then id.
/// Throws CycleDetected on a corrupted node table.
std::vector<NodeId> topo_order(const MetricsPlan& p);
/// Same order over a bare node table, which unlike a plan may hold a cycle.
std::vector<NodeId> topo_order(const std::vector<PlanNode>& nodes);

/// Semantic re-check: children exist, edges acyclic, levels consistent.
/// Throws Internal or CycleDetected.
void verify(const MetricsPlan& p);

}  // namespace metriq::plan
