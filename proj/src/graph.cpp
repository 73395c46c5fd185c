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

#include "t4c/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "t4c/error.hpp"

namespace t4c {

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  in_.resize(nodes_.size());
  out_.resize(nodes_.size());
  index_.reserve(edges_.size());
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const RoadEdge& edge = edges_[e];
    if (edge.src >= nodes_.size() || edge.dst >= nodes_.size()) continue;
    out_[edge.src].push_back(e);
    in_[edge.dst].push_back(e);
    index_.try_emplace(key(edge.src, edge.dst), e);
  }
}

std::optional<EdgeId> RoadGraph::find_edge(NodeId src, NodeId dst) const {
  auto it = index_.find(key(src, dst));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> SupersegmentSet::supernodes() const {
  std::vector<NodeId> out;
  out.reserve(2 * segments.size());
  for (const auto& s : segments) {
    if (s.path.empty()) continue;
    out.push_back(s.head());
    out.push_back(s.tail());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream out;
  (out << ... << args);
  return out.str();
}

}  // namespace

ValidationReport validate(const RoadGraph& graph, const SupersegmentSet& segments,
                          std::span<const Sample> samples) {
  ValidationReport report;
  auto& v = report.violations;
  const std::size_t n = graph.num_nodes();

  for (NodeId i = 0; i < n; ++i) {
    const RoadNode& node = graph.node(i);
    if (!std::isfinite(node.x) || !std::isfinite(node.y)) {
      v.push_back(cat("nodes[", i, "]: non-finite coordinate"));
    }
  }

  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const RoadEdge& edge = graph.edge(e);
    if (edge.src >= n || edge.dst >= n) {
      v.push_back(cat("edges[", e, "]: endpoint out of range"));
      continue;
    }
    if (edge.src == edge.dst) v.push_back(cat("edges[", e, "]: self loop"));
    if (!(edge.length_meters > 0.0) || !std::isfinite(edge.length_meters)) {
      v.push_back(cat("edges[", e, "]: length_meters must be positive"));
    }
    if (!(edge.parsed_maxspeed > 0.0) || !std::isfinite(edge.parsed_maxspeed)) {
      v.push_back(cat("edges[", e, "]: parsed_maxspeed must be positive"));
    }
    if (!std::isfinite(edge.importance)) {
      v.push_back(cat("edges[", e, "]: non-finite importance"));
    }
    if (graph.find_edge(edge.src, edge.dst) != e) {
      v.push_back(cat("edges[", e, "]: duplicate edge (", edge.src, ",", edge.dst,
                      ")"));
    }
  }

  for (SegmentId s = 0; s < segments.size(); ++s) {
    const auto& path = segments.segments[s].path;
    if (path.size() < 2) {
      v.push_back(cat("supersegments[", s, "]: path needs at least 2 nodes"));
      continue;
    }
    bool in_range = std::all_of(path.begin(), path.end(),
                                [n](NodeId id) { return id < n; });
    if (!in_range) {
      v.push_back(cat("supersegments[", s, "]: node out of range"));
      continue;
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (!graph.find_edge(path[i], path[i + 1])) {
        v.push_back(cat("supersegments[", s, "]: no edge between path nodes ",
                        path[i], " and ", path[i + 1]));
        break;
      }
    }
  }

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Sample& sample = samples[k];
    if (sample.counts.size() != n) {
      v.push_back(cat("samples[", k, "]: counts length ", sample.counts.size(),
                      " != node count ", n));
    } else {
      for (NodeId i = 0; i < n; ++i) {
        for (const auto& c : sample.counts[i]) {
          if (!c) continue;
          if (!graph.node(i).has_counter) {
            v.push_back(cat("samples[", k, "]: count at node ", i,
                            " which has no counter"));
            break;
          }
          if (!(*c >= 0.0) || !std::isfinite(*c)) {
            v.push_back(cat("samples[", k, "]: negative or non-finite count at node ", i));
            break;
          }
        }
      }
    }
    if (sample.edge_labels.size() != graph.num_edges()) {
      v.push_back(cat("samples[", k, "]: edge_labels length ",
                      sample.edge_labels.size(), " != edge count ", graph.num_edges()));
    } else {
      for (EdgeId e = 0; e < graph.num_edges(); ++e) {
        if (sample.edge_labels[e] && *sample.edge_labels[e] < 0) {
          v.push_back(cat("samples[", k, "]: negative label at edge ", e));
          break;
        }
      }
    }
    if (sample.segment_etas.size() != segments.size()) {
      v.push_back(cat("samples[", k, "]: segment_etas length ",
                      sample.segment_etas.size(), " != segment count ",
                      segments.size()));
    } else {
      for (SegmentId s = 0; s < segments.size(); ++s) {
        const auto& eta = sample.segment_etas[s];
        if (eta && (!(*eta > 0.0) || !std::isfinite(*eta))) {
          v.push_back(cat("samples[", k, "]: non-positive eta at segment ", s));
          break;
        }
      }
    }
  }
  return report;
}

void require_valid(const Dataset& dataset) {
  auto report = validate(dataset);
  if (!report.ok()) fail(ErrorKind::kValidation, report.violations.front());
}

Sample empty_sample(const RoadGraph& graph, std::size_t num_segments,
                    std::int64_t t) {
  Sample s;
  s.t = t;
  s.counts.assign(graph.num_nodes(), CounterReading{});
  s.edge_labels.assign(graph.num_edges(), std::nullopt);
  s.segment_etas.assign(num_segments, std::nullopt);
  return s;
}

}  // namespace t4c
