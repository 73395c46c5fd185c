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

#include "t4c/compaction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "t4c/error.hpp"

namespace t4c::compaction {

EdgeMapping EdgeMapping::identity(std::size_t num_edges) {
  EdgeMapping m;
  m.compact_to_original.resize(num_edges);
  m.original_to_compact.resize(num_edges);
  for (EdgeId e = 0; e < num_edges; ++e) {
    m.compact_to_original[e] = {e};
    m.original_to_compact[e] = e;
  }
  return m;
}

bool is_removable(const RoadGraph& graph, NodeId v) {
  const auto out = graph.outgoing(v);
  const auto in = graph.incoming(v);
  if (out.size() != 2 || in.size() != 2) return false;
  NodeId a = graph.edge(out[0]).dst, b = graph.edge(out[1]).dst;
  if (a == b) return false;
  std::set<NodeId> sources{graph.edge(in[0]).src, graph.edge(in[1]).src};
  if (sources != std::set<NodeId>{a, b}) return false;
  return !graph.find_edge(a, b) && !graph.find_edge(b, a);
}

RoadEdge merge_edge_features(const RoadEdge& e1, const RoadEdge& e2) {
  if (e1.dst != e2.src) {
    fail(ErrorKind::kValidation, "merge_edge_features: edges are not consecutive");
  }
  RoadEdge out;
  out.src = e1.src;
  out.dst = e2.dst;
  out.parsed_maxspeed = (e1.parsed_maxspeed + e2.parsed_maxspeed) / 2.0;
  out.importance = (e1.importance + e2.importance) / 2.0;
  out.length_meters = e1.length_meters + e2.length_meters;
  return out;
}

std::optional<int> merge_labels(std::optional<int> l1, std::optional<int> l2) {
  if (!l1) return l2;
  if (!l2) return l1;
  return std::max(*l1, *l2);
}

namespace {

struct WorkEdge {
  RoadEdge attrs;
  std::vector<EdgeId> originals;
  std::vector<std::optional<int>> labels;  // per sample
  bool alive = true;
};

// Mutable view of the graph while nodes are being removed.
class WorkGraph {
 public:
  WorkGraph(const RoadGraph& g, std::span<const Sample> samples)
      : out_(g.num_nodes()), in_(g.num_nodes()), alive_(g.num_nodes(), true) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      WorkEdge w;
      w.attrs = g.edge(e);
      w.originals = {e};
      for (const Sample& s : samples) w.labels.push_back(s.edge_labels[e]);
      add(std::move(w));
    }
  }

  bool removable(NodeId v) const {
    if (!alive_[v] || out_[v].size() != 2 || in_[v].size() != 2) return false;
    auto it = out_[v].begin();
    const NodeId a = it->first, b = std::next(it)->first;
    if (!in_[v].contains(a) || !in_[v].contains(b)) return false;
    return !out_[a].contains(b) && !out_[b].contains(a);
  }

  // Replaces a<->v<->b with a<->b; returns the two neighbors (a < b).
  std::pair<NodeId, NodeId> remove(NodeId v, std::size_t num_samples) {
    auto it = out_[v].begin();
    const NodeId a = it->first, b = std::next(it)->first;
    join(in_[v].at(a), out_[v].at(b), num_samples);
    join(in_[v].at(b), out_[v].at(a), num_samples);
    for (NodeId n : {a, b}) {
      kill(in_[v].at(n));
      kill(out_[v].at(n));
    }
    alive_[v] = false;
    return {a, b};
  }

  bool alive(NodeId v) const { return alive_[v]; }
  bool isolated(NodeId v) const { return out_[v].empty() && in_[v].empty(); }
  void drop(NodeId v) { alive_[v] = false; }
  const std::vector<WorkEdge>& edges() const { return edges_; }

 private:
  void add(WorkEdge w) {
    const auto id = edges_.size();
    out_[w.attrs.src].emplace(w.attrs.dst, id);
    in_[w.attrs.dst].emplace(w.attrs.src, id);
    edges_.push_back(std::move(w));
  }

  void join(std::size_t first, std::size_t second, std::size_t num_samples) {
    const WorkEdge& e1 = edges_[first];
    const WorkEdge& e2 = edges_[second];
    WorkEdge merged;
    merged.attrs = merge_edge_features(e1.attrs, e2.attrs);
    merged.originals = e1.originals;
    merged.originals.insert(merged.originals.end(), e2.originals.begin(), e2.originals.end());
    for (std::size_t s = 0; s < num_samples; ++s) {
      merged.labels.push_back(merge_labels(e1.labels[s], e2.labels[s]));
    }
    add(std::move(merged));
  }

  void kill(std::size_t id) {
    WorkEdge& e = edges_[id];
    e.alive = false;
    out_[e.attrs.src].erase(e.attrs.dst);
    in_[e.attrs.dst].erase(e.attrs.src);
  }

  std::vector<std::map<NodeId, std::size_t>> out_;
  std::vector<std::map<NodeId, std::size_t>> in_;
  std::vector<bool> alive_;
  std::vector<WorkEdge> edges_;
};

}  // namespace

CompactionResult compact(const RoadGraph& graph, std::span<const Sample> samples,
                         const CompactOptions& options) {
  const std::size_t n = graph.num_nodes();
  for (const Sample& s : samples) {
    if (s.counts.size() != n || s.edge_labels.size() != graph.num_edges()) {
      fail(ErrorKind::kValidation, "compact: sample does not match graph");
    }
  }
  std::vector<bool> keep(n, false);
  for (NodeId v : options.keep) {
    if (v < n) keep[v] = true;
  }

  WorkGraph work(graph, samples);
  std::vector<std::vector<CounterReading>> counts;
  for (const Sample& s : samples) counts.push_back(s.counts);
  std::vector<bool> has_counter(n);
  for (NodeId v = 0; v < n; ++v) has_counter[v] = graph.node(v).has_counter;

  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId v = 0; v < n; ++v) {
      if (keep[v] || !work.removable(v)) continue;
      const auto [a, b] = work.remove(v, samples.size());
      for (auto& sample_counts : counts) {
        for (std::size_t i = 0; i < kNumIntervals; ++i) {
          const auto& value = sample_counts[v][i];
          if (!value) continue;
          for (NodeId nb : {a, b}) {
            if (!sample_counts[nb][i]) {
              sample_counts[nb][i] = value;
              has_counter[nb] = true;
            }
          }
        }
      }
      changed = true;
    }
  }

  CompactionResult result;
  for (NodeId v = 0; v < n; ++v) {
    if (work.alive(v) && work.isolated(v)) {
      work.drop(v);
      result.removed_isolated.push_back(v);
    }
  }

  result.node_map.assign(n, std::nullopt);
  std::vector<RoadNode> nodes;
  std::vector<NodeId> survivors;
  for (NodeId v = 0; v < n; ++v) {
    if (!work.alive(v)) continue;
    result.node_map[v] = static_cast<NodeId>(nodes.size());
    RoadNode node = graph.node(v);
    node.has_counter = has_counter[v];
    nodes.push_back(node);
    survivors.push_back(v);
  }

  std::vector<const WorkEdge*> alive_edges;
  for (const WorkEdge& e : work.edges()) {
    if (e.alive) alive_edges.push_back(&e);
  }
  auto first_original = [](const WorkEdge* e) {
    return *std::min_element(e->originals.begin(), e->originals.end());
  };
  std::sort(alive_edges.begin(), alive_edges.end(),
            [&](const WorkEdge* x, const WorkEdge* y) { return first_original(x) < first_original(y); });

  std::vector<RoadEdge> edges;
  result.mapping.original_to_compact.assign(graph.num_edges(), 0);
  for (const WorkEdge* e : alive_edges) {
    const auto id = static_cast<EdgeId>(edges.size());
    RoadEdge attrs = e->attrs;
    attrs.src = *result.node_map[attrs.src];
    attrs.dst = *result.node_map[attrs.dst];
    edges.push_back(attrs);
    result.mapping.compact_to_original.push_back(e->originals);
    for (EdgeId o : e->originals) result.mapping.original_to_compact[o] = id;
  }
  result.graph = RoadGraph(std::move(nodes), std::move(edges));

  for (std::size_t s = 0; s < samples.size(); ++s) {
    Sample out;
    out.t = samples[s].t;
    out.segment_etas = samples[s].segment_etas;
    for (NodeId v : survivors) out.counts.push_back(counts[s][v]);
    for (const WorkEdge* e : alive_edges) out.edge_labels.push_back(e->labels[s]);
    result.samples.push_back(std::move(out));
  }
  return result;
}

SupersegmentSet remap_segments(const SupersegmentSet& segments,
                               const CompactionResult& result) {
  SupersegmentSet out;
  for (SegmentId s = 0; s < segments.size(); ++s) {
    const auto& path = segments.segments[s].path;
    if (path.empty() || path.front() >= result.node_map.size() ||
        path.back() >= result.node_map.size() || !result.node_map[path.front()] ||
        !result.node_map[path.back()]) {
      fail(ErrorKind::kValidation,
           "supersegments[" + std::to_string(s) + "]: endpoint removed by compaction");
    }
    Supersegment seg;
    for (NodeId v : path) {
      if (v < result.node_map.size() && result.node_map[v]) seg.path.push_back(*result.node_map[v]);
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

Dataset compact_dataset(const Dataset& dataset, EdgeMapping* mapping) {
  CompactOptions options;
  options.keep = dataset.segments.supernodes();
  CompactionResult result = compact(dataset.graph, dataset.samples, options);
  Dataset out;
  out.segments = remap_segments(dataset.segments, result);
  out.graph = std::move(result.graph);
  out.samples = std::move(result.samples);
  if (mapping) *mapping = std::move(result.mapping);
  return out;
}

std::vector<double> expand_predictions(std::span<const double> values,
                                       std::size_t width,
                                       const EdgeMapping& mapping) {
  if (values.size() != mapping.num_compact() * width) {
    fail(ErrorKind::kUsage, "expand_predictions: value count does not match compact edge count");
  }
  std::vector<double> out(mapping.num_original() * width);
  for (EdgeId c = 0; c < mapping.num_compact(); ++c) {
    for (EdgeId o : mapping.compact_to_original[c]) {
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(c * width), width,
                  out.begin() + static_cast<std::ptrdiff_t>(o * width));
    }
  }
  return out;
}

Json mapping_to_json(const EdgeMapping& mapping) {
  Json out = Json::array();
  for (const auto& list : mapping.compact_to_original) out.push_back(list);
  return out;
}

EdgeMapping mapping_from_json(const Json& json) {
  if (!json.is_array()) fail(ErrorKind::kParse, "mapping: expected an array");
  EdgeMapping m;
  std::size_t total = 0;
  for (const Json& list : json) {
    if (!list.is_array()) fail(ErrorKind::kParse, "mapping: expected arrays of edge ids");
    std::vector<EdgeId> ids;
    for (const Json& id : list) {
      if (!id.is_number_unsigned()) fail(ErrorKind::kParse, "mapping: edge ids must be non-negative integers");
      ids.push_back(id.get<EdgeId>());
    }
    total += ids.size();
    m.compact_to_original.push_back(std::move(ids));
  }
  std::vector<bool> seen(total, false);
  m.original_to_compact.assign(total, 0);
  for (EdgeId c = 0; c < m.num_compact(); ++c) {
    for (EdgeId o : m.compact_to_original[c]) {
      if (o >= total || seen[o]) {
        fail(ErrorKind::kValidation, "mapping: original edge ids must cover [0, M) exactly once");
      }
      seen[o] = true;
      m.original_to_compact[o] = c;
    }
  }
  return m;
}

}  // namespace t4c::compaction
