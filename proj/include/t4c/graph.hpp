// Copyright 2026 The t4c Authors.
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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace t4c {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using SegmentId = std::uint32_t;

inline constexpr std::size_t kNumIntervals = 4;

struct RoadNode {
  double x = 0.0;
  double y = 0.0;
  bool has_counter = false;

  bool operator==(const RoadNode&) const = default;
};

struct RoadEdge {
  NodeId src = 0;
  NodeId dst = 0;
  double parsed_maxspeed = 0.0;  // km/h
  double importance = 0.0;
  double length_meters = 0.0;

  bool operator==(const RoadEdge&) const = default;
};

// Directed simple graph with per-node incoming/outgoing edge lists. The
// constructor never throws on bad data; structural problems surface through
// validate(). Edges with out-of-range endpoints are left out of adjacency.
class RoadGraph {
 public:
  RoadGraph() = default;
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const RoadNode& node(NodeId v) const { return nodes_[v]; }
  const RoadEdge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const EdgeId> incoming(NodeId v) const { return in_[v]; }
  std::span<const EdgeId> outgoing(NodeId v) const { return out_[v]; }

  // First edge with the given ordered endpoints, if any.
  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;

  bool operator==(const RoadGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  static std::uint64_t key(NodeId src, NodeId dst) {
    return (static_cast<std::uint64_t>(src) << 32) | dst;
  }

  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<std::vector<EdgeId>> out_;
  std::unordered_map<std::uint64_t, EdgeId> index_;
};

// Ordered shortest path between two supernodes; head = path.front(),
// tail = path.back().
struct Supersegment {
  std::vector<NodeId> path;

  NodeId head() const { return path.front(); }
  NodeId tail() const { return path.back(); }

  bool operator==(const Supersegment&) const = default;
};

struct SupersegmentSet {
  std::vector<Supersegment> segments;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }

  // Sorted, deduplicated heads and tails.
  std::vector<NodeId> supernodes() const;

  bool operator==(const SupersegmentSet&) const = default;
};

using CounterReading = std::array<std::optional<double>, kNumIntervals>;

struct Sample {
  std::int64_t t = 0;
  std::vector<CounterReading> counts;             // one per node
  std::vector<std::optional<int>> edge_labels;    // one per edge
  std::vector<std::optional<double>> segment_etas;  // one per segment, seconds

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  RoadGraph graph;
  SupersegmentSet segments;
  std::vector<Sample> samples;

  bool operator==(const Dataset&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const RoadGraph& graph, const SupersegmentSet& segments,
                          std::span<const Sample> samples);

inline ValidationReport validate(const Dataset& dataset) {
  return validate(dataset.graph, dataset.segments, dataset.samples);
}

// Throws Error(kValidation) naming the first violation.
void require_valid(const Dataset& dataset);

// Sample with every value absent, sized for `graph` and `num_segments`.
Sample empty_sample(const RoadGraph& graph, std::size_t num_segments,
                    std::int64_t t = 0);

}  // namespace t4c
