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

#include "t4c/supergraph.hpp"

#include <algorithm>
#include <set>

#include "t4c/error.hpp"

namespace t4c::supergraph {

std::string approach_name(Approach a) {
  switch (a) {
    case Approach::kNone: return "none";
    case Approach::kSuperEdges: return "1";
    case Approach::kPooling: return "2";
    case Approach::kMirrors: return "3";
    case Approach::kCombined: return "1+2";
  }
  return "none";
}

Approach parse_approach(const std::string& name) {
  if (name == "none" || name == "0") return Approach::kNone;
  if (name == "1") return Approach::kSuperEdges;
  if (name == "2") return Approach::kPooling;
  if (name == "3") return Approach::kMirrors;
  if (name == "1+2" || name == "12") return Approach::kCombined;
  fail(ErrorKind::kUsage, "unknown approach '" + name + "' (expected none, 1, 2, 3 or 1+2)");
}

std::string role_name(NodeRole role) {
  return role == NodeRole::kSegmentNode ? "segment_node" : "supernode_mirror";
}

std::string role_name(EdgeRole role) {
  switch (role) {
    case EdgeRole::kSuperEdge: return "super_edge";
    case EdgeRole::kPoolIn: return "pool_in";
    case EdgeRole::kPoolOut: return "pool_out";
    case EdgeRole::kSegmentLinkIn: return "segment_link_in";
    case EdgeRole::kSegmentLinkOut: return "segment_link_out";
  }
  return "";
}

namespace {

NodeRole parse_node_role(const std::string& s) {
  if (s == "segment_node") return NodeRole::kSegmentNode;
  if (s == "supernode_mirror") return NodeRole::kSupernodeMirror;
  fail(ErrorKind::kParse, "unknown extra node role '" + s + "'");
}

EdgeRole parse_edge_role(const std::string& s) {
  for (std::size_t r = 0; r < kNumEdgeRoles; ++r) {
    if (role_name(static_cast<EdgeRole>(r)) == s) return static_cast<EdgeRole>(r);
  }
  fail(ErrorKind::kParse, "unknown extra edge role '" + s + "'");
}

void add_super_edges(const SupersegmentSet& segments, const BuildOptions& options,
                     std::vector<ExtraEdge>& edges) {
  std::set<std::pair<NodeId, NodeId>> seen;
  auto add = [&](NodeId a, NodeId b) {
    if (seen.emplace(a, b).second) edges.push_back({a, b, EdgeRole::kSuperEdge});
  };
  for (const auto& s : segments.segments) {
    add(s.head(), s.tail());
    if (options.symmetric_super_edges) add(s.tail(), s.head());
  }
}

void add_segment_nodes(const RoadGraph& graph, const SupersegmentSet& segments,
                       std::vector<ExtraNode>& nodes, std::vector<ExtraEdge>& edges) {
  for (SegmentId s = 0; s < segments.size(); ++s) {
    const auto id = static_cast<NodeId>(graph.num_nodes() + nodes.size());
    nodes.push_back({NodeRole::kSegmentNode, s});
    for (NodeId v : segments.segments[s].path) edges.push_back({v, id, EdgeRole::kPoolIn});
    for (NodeId v : segments.segments[s].path) edges.push_back({id, v, EdgeRole::kPoolOut});
  }
}

}  // namespace

ExtendedGraph::ExtendedGraph(RoadGraph base, SupersegmentSet segments, Approach approach,
                             std::vector<ExtraNode> extra_nodes,
                             std::vector<ExtraEdge> extra_edges)
    : base_(std::move(base)),
      segments_(std::move(segments)),
      approach_(approach),
      extra_nodes_(std::move(extra_nodes)),
      extra_edges_(std::move(extra_edges)) {
  const std::size_t total = num_nodes();
  for (std::size_t i = 0; i < extra_edges_.size(); ++i) {
    const ExtraEdge& e = extra_edges_[i];
    if (e.src >= total || e.dst >= total) {
      fail(ErrorKind::kValidation, "extra_edges[" + std::to_string(i) + "]: endpoint out of range");
    }
    by_role_[static_cast<std::size_t>(e.role)].push_back(i);
  }
  bool any_segment_node = std::any_of(extra_nodes_.begin(), extra_nodes_.end(), [](const ExtraNode& n) {
    return n.role == NodeRole::kSegmentNode;
  });
  if (any_segment_node) {
    segment_nodes_.assign(segments_.size(), UINT32_MAX);
    for (std::size_t i = 0; i < extra_nodes_.size(); ++i) {
      const ExtraNode& n = extra_nodes_[i];
      if (n.role != NodeRole::kSegmentNode) continue;
      if (n.ref >= segments_.size() || segment_nodes_[n.ref] != UINT32_MAX) {
        fail(ErrorKind::kValidation, "extra_nodes[" + std::to_string(i) +
                                         "]: segment node must reference exactly one supersegment");
      }
      segment_nodes_[n.ref] = static_cast<NodeId>(base_.num_nodes() + i);
    }
  }
}

std::optional<NodeId> ExtendedGraph::segment_node(SegmentId s) const {
  if (s >= segment_nodes_.size() || segment_nodes_[s] == UINT32_MAX) return std::nullopt;
  return segment_nodes_[s];
}

ExtendedGraph plain(const RoadGraph& graph, const SupersegmentSet& segments) {
  return ExtendedGraph(graph, segments, Approach::kNone, {}, {});
}

ExtendedGraph build_approach1(const RoadGraph& graph, const SupersegmentSet& segments,
                              const BuildOptions& options) {
  std::vector<ExtraEdge> edges;
  add_super_edges(segments, options, edges);
  return ExtendedGraph(graph, segments, Approach::kSuperEdges, {}, std::move(edges));
}

ExtendedGraph build_approach2(const RoadGraph& graph, const SupersegmentSet& segments) {
  std::vector<ExtraNode> nodes;
  std::vector<ExtraEdge> edges;
  add_segment_nodes(graph, segments, nodes, edges);
  return ExtendedGraph(graph, segments, Approach::kPooling, std::move(nodes), std::move(edges));
}

ExtendedGraph build_approach3(const RoadGraph& graph, const SupersegmentSet& segments) {
  std::vector<ExtraNode> nodes;
  std::vector<ExtraEdge> edges;
  add_segment_nodes(graph, segments, nodes, edges);
  const std::size_t first_mirror = graph.num_nodes() + nodes.size();
  const std::vector<NodeId> supernodes = segments.supernodes();
  for (NodeId v : supernodes) nodes.push_back({NodeRole::kSupernodeMirror, v});
  auto mirror_of = [&](NodeId v) {
    auto it = std::lower_bound(supernodes.begin(), supernodes.end(), v);
    return static_cast<NodeId>(first_mirror + static_cast<std::size_t>(it - supernodes.begin()));
  };
  for (SegmentId s = 0; s < segments.size(); ++s) {
    const auto seg_node = static_cast<NodeId>(graph.num_nodes() + s);
    for (NodeId end : {segments.segments[s].head(), segments.segments[s].tail()}) {
      const NodeId m = mirror_of(end);
      edges.push_back({m, seg_node, EdgeRole::kSegmentLinkIn});
      edges.push_back({seg_node, m, EdgeRole::kSegmentLinkOut});
    }
  }
  return ExtendedGraph(graph, segments, Approach::kMirrors, std::move(nodes), std::move(edges));
}

ExtendedGraph build_combined(const RoadGraph& graph, const SupersegmentSet& segments,
                             const BuildOptions& options) {
  std::vector<ExtraNode> nodes;
  std::vector<ExtraEdge> edges;
  add_segment_nodes(graph, segments, nodes, edges);
  add_super_edges(segments, options, edges);
  return ExtendedGraph(graph, segments, Approach::kCombined, std::move(nodes), std::move(edges));
}

ExtendedGraph build(Approach approach, const RoadGraph& graph,
                    const SupersegmentSet& segments, const BuildOptions& options) {
  switch (approach) {
    case Approach::kNone: return plain(graph, segments);
    case Approach::kSuperEdges: return build_approach1(graph, segments, options);
    case Approach::kPooling: return build_approach2(graph, segments);
    case Approach::kMirrors: return build_approach3(graph, segments);
    case Approach::kCombined: return build_combined(graph, segments, options);
  }
  return plain(graph, segments);
}

Additions count_additions(const ExtendedGraph& extended) {
  Additions a;
  a.nodes = extended.extra_nodes().size();
  a.edges = extended.extra_edges().size();
  for (const ExtraNode& n : extended.extra_nodes()) ++a.nodes_by_role[static_cast<std::size_t>(n.role)];
  for (const ExtraEdge& e : extended.extra_edges()) ++a.edges_by_role[static_cast<std::size_t>(e.role)];
  return a;
}

Json extended_to_json(const ExtendedGraph& extended, const std::vector<Sample>& samples) {
  Dataset d{extended.base(), extended.segments(), samples};
  Json out = dataset_to_json(d);
  out["approach"] = approach_name(extended.approach());
  Json nodes = Json::array();
  for (const ExtraNode& n : extended.extra_nodes()) {
    Json j{{"role", role_name(n.role)}};
    j[n.role == NodeRole::kSegmentNode ? "segment" : "node"] = n.ref;
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const ExtraEdge& e : extended.extra_edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"role", role_name(e.role)}});
  }
  out["extra_nodes"] = std::move(nodes);
  out["extra_edges"] = std::move(edges);
  return out;
}

std::string serialize_extended(const ExtendedGraph& extended,
                               const std::vector<Sample>& samples) {
  return extended_to_json(extended, samples).dump() + "\n";
}

ExtendedDataset extended_from_json(const Json& json) {
  Dataset d = dataset_from_json(json);
  require_valid(d);
  if (!json.contains("extra_nodes") && !json.contains("extra_edges")) {
    return {plain(d.graph, d.segments), std::move(d.samples)};
  }
  try {
    const Approach approach = parse_approach(json.value("approach", std::string("none")));
    std::vector<ExtraNode> nodes;
    for (const Json& jn : json.at("extra_nodes")) {
      const NodeRole role = parse_node_role(jn.at("role").get<std::string>());
      const char* key = role == NodeRole::kSegmentNode ? "segment" : "node";
      const auto ref = jn.at(key).get<std::uint32_t>();
      if (role == NodeRole::kSupernodeMirror && ref >= d.graph.num_nodes()) {
        fail(ErrorKind::kValidation, "extra_nodes: mirror references a missing node");
      }
      nodes.push_back({role, ref});
    }
    std::vector<ExtraEdge> edges;
    for (const Json& je : json.at("extra_edges")) {
      edges.push_back({je.at("src").get<NodeId>(), je.at("dst").get<NodeId>(),
                       parse_edge_role(je.at("role").get<std::string>())});
    }
    return {ExtendedGraph(d.graph, d.segments, approach, std::move(nodes), std::move(edges)),
            std::move(d.samples)};
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("extended graph: ") + e.what());
  }
}

ExtendedDataset load_extended(const std::filesystem::path& path) {
  return extended_from_json(parse_json(read_file(path), path.string()));
}

}  // namespace t4c::supergraph
