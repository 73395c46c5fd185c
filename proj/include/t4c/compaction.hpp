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
#include <span>
#include <vector>

#include "t4c/graph.hpp"
#include "t4c/io.hpp"

namespace t4c::compaction {

// compact edge -> path-ordered original edges, plus the inverse.
struct EdgeMapping {
  std::vector<std::vector<EdgeId>> compact_to_original;
  std::vector<EdgeId> original_to_compact;

  std::size_t num_compact() const { return compact_to_original.size(); }
  std::size_t num_original() const { return original_to_compact.size(); }

  static EdgeMapping identity(std::size_t num_edges);
  bool operator==(const EdgeMapping&) const = default;
};

struct CompactionResult {
  RoadGraph graph;
  EdgeMapping mapping;
  std::vector<NodeId> removed_isolated;
  std::vector<std::optional<NodeId>> node_map;  // original -> compact
  std::vector<Sample> samples;                  // re-indexed to `graph`
};

struct CompactOptions {
  // Nodes that are never removed even if removable (e.g. supernodes that
  // anchor supersegments).
  std::vector<NodeId> keep;
};

// v has exactly two distinct neighbors a and b, its only incident edges are
// a->v, v->a, b->v, v->b, and neither a->b nor b->a exists.
bool is_removable(const RoadGraph& graph, NodeId v);

// e1 followed by e2: speed and importance averaged, lengths summed.
RoadEdge merge_edge_features(const RoadEdge& e1, const RoadEdge& e2);

// Agreement or the only present value; conflicting labels resolve to the
// higher (more congested) class.
std::optional<int> merge_labels(std::optional<int> l1, std::optional<int> l2);

// Removes removable nodes in ascending id order, pass after pass, until none
// is left; then drops isolated nodes. Counter values of a removed node are
// copied per interval to each neighbor whose value for that interval is
// unknown. Compact edges are ordered by their smallest original edge id, so
// an already-compact graph comes back unchanged.
CompactionResult compact(const RoadGraph& graph, std::span<const Sample> samples,
                         const CompactOptions& options = {});

// Maps segment paths through node_map. Removed interior nodes are dropped
// (the merged edge joins the survivors); a removed head or tail is a
// validation error.
SupersegmentSet remap_segments(const SupersegmentSet& segments,
                               const CompactionResult& result);

// Compacts a whole dataset; its supernodes are kept so that segments survive.
Dataset compact_dataset(const Dataset& dataset, EdgeMapping* mapping = nullptr);

// values holds num_compact rows of `width` entries; the result holds
// num_original rows, each copied from its compact edge.
std::vector<double> expand_predictions(std::span<const double> values,
                                       std::size_t width,
                                       const EdgeMapping& mapping);

// JSON array indexed by compact edge id listing original edge ids.
Json mapping_to_json(const EdgeMapping& mapping);
// Requires every original id in [0, M) to appear exactly once.
EdgeMapping mapping_from_json(const Json& json);

}  // namespace t4c::compaction
