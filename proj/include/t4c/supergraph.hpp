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

#include <optional>
#include <string>
#include <vector>

#include "t4c/graph.hpp"
#include "t4c/io.hpp"

namespace t4c::supergraph {

enum class Approach {
  kNone,      // plain road graph
  kSuperEdges,  // (1) edges between connected supernodes
  kPooling,     // (2) one node per supersegment
  kMirrors,     // (3) pooling plus mirrors of the supernodes
  kCombined,    // (1) and (2) together
};

std::string approach_name(Approach approach);  // "none", "1", "2", "3", "1+2"
Approach parse_approach(const std::string& name);

enum class NodeRole { kSegmentNode, kSupernodeMirror };

enum class EdgeRole {
  kSuperEdge,
  kPoolIn,          // path node -> segment node
  kPoolOut,         // segment node -> path node
  kSegmentLinkIn,   // mirror -> segment node
  kSegmentLinkOut,  // segment node -> mirror
};
inline constexpr std::size_t kNumEdgeRoles = 5;

std::string role_name(NodeRole role);
std::string role_name(EdgeRole role);

struct ExtraNode {
  NodeRole role;
  std::uint32_t ref;  // SegmentId for segment nodes, base NodeId for mirrors

  bool operator==(const ExtraNode&) const = default;
};

// Endpoints index the combined node space: base nodes first, then extras.
struct ExtraEdge {
  NodeId src;
  NodeId dst;
  EdgeRole role;

  bool operator==(const ExtraEdge&) const = default;
};

struct BuildOptions {
  bool symmetric_super_edges = false;
};

class ExtendedGraph {
 public:
  ExtendedGraph() = default;
  ExtendedGraph(RoadGraph base, SupersegmentSet segments, Approach approach,
                std::vector<ExtraNode> extra_nodes, std::vector<ExtraEdge> extra_edges);

  const RoadGraph& base() const { return base_; }
  const SupersegmentSet& segments() const { return segments_; }
  Approach approach() const { return approach_; }
  const std::vector<ExtraNode>& extra_nodes() const { return extra_nodes_; }
  const std::vector<ExtraEdge>& extra_edges() const { return extra_edges_; }

  std::size_t num_nodes() const { return base_.num_nodes() + extra_nodes_.size(); }

  // Indices into extra_edges() carrying `role`, in insertion order.
  const std::vector<std::size_t>& edges_with(EdgeRole role) const {
    return by_role_[static_cast<std::size_t>(role)];
  }

  // Combined-space node id of each segment's pooling node, if present.
  std::optional<NodeId> segment_node(SegmentId s) const;
  bool has_segment_nodes() const { return !segment_nodes_.empty(); }

  bool operator==(const ExtendedGraph& o) const {
    return base_ == o.base_ && segments_ == o.segments_ && approach_ == o.approach_ &&
           extra_nodes_ == o.extra_nodes_ && extra_edges_ == o.extra_edges_;
  }

 private:
  RoadGraph base_;
  SupersegmentSet segments_;
  Approach approach_ = Approach::kNone;
  std::vector<ExtraNode> extra_nodes_;
  std::vector<ExtraEdge> extra_edges_;
  std::vector<std::vector<std::size_t>> by_role_ =
      std::vector<std::vector<std::size_t>>(kNumEdgeRoles);
  std::vector<NodeId> segment_nodes_;  // indexed by SegmentId
};

ExtendedGraph plain(const RoadGraph& graph, const SupersegmentSet& segments);

// One super edge head->tail per segment (plus tail->head when symmetric),
// exact duplicates removed.
ExtendedGraph build_approach1(const RoadGraph& graph, const SupersegmentSet& segments,
                              const BuildOptions& options = {});

// One segment node per segment with pool_in and pool_out edges to every
// node on its path.
ExtendedGraph build_approach2(const RoadGraph& graph, const SupersegmentSet& segments);

// Approach 2 plus one mirror per distinct supernode, linked both ways to the
// segment nodes of the segments it terminates.
ExtendedGraph build_approach3(const RoadGraph& graph, const SupersegmentSet& segments);

// Approach 2's segment nodes plus approach 1's super edges.
ExtendedGraph build_combined(const RoadGraph& graph, const SupersegmentSet& segments,
                             const BuildOptions& options = {});

ExtendedGraph build(Approach approach, const RoadGraph& graph,
                    const SupersegmentSet& segments, const BuildOptions& options = {});

struct Additions {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t nodes_by_role[2] = {0, 0};
  std::size_t edges_by_role[kNumEdgeRoles] = {0, 0, 0, 0, 0};
};

Additions count_additions(const ExtendedGraph& extended);

// Dataset keys plus "approach", "extra_nodes" and "extra_edges".
Json extended_to_json(const ExtendedGraph& extended, const std::vector<Sample>& samples);
std::string serialize_extended(const ExtendedGraph& extended,
                               const std::vector<Sample>& samples);

struct ExtendedDataset {
  ExtendedGraph graph;
  std::vector<Sample> samples;
};

// Accepts both plain dataset files (approach "none") and extended files.
ExtendedDataset load_extended(const std::filesystem::path& path);
ExtendedDataset extended_from_json(const Json& json);

}  // namespace t4c::supergraph
