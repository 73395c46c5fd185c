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

#include "t4c/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "t4c/error.hpp"
#include "t4c/rng.hpp"

namespace t4c::synth {

namespace {

constexpr double kLon0 = -0.15;
constexpr double kLat0 = 51.45;
constexpr double kMetersPerLon = 70000.0;
constexpr double kMetersPerLat = 111000.0;
constexpr double kIntervalScale[kNumIntervals] = {0.8, 0.9, 1.1, 1.2};
constexpr double kCounterMissingRate = 0.1;

struct Point {
  double x, y;
};

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Dijkstra over length_meters. Ties resolve toward smaller node ids so the
// predecessor tree is deterministic.
void shortest_paths(const RoadGraph& g, NodeId source, std::vector<double>& dist,
                    std::vector<NodeId>& pred) {
  const double inf = std::numeric_limits<double>::infinity();
  dist.assign(g.num_nodes(), inf);
  pred.assign(g.num_nodes(), source);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (EdgeId e : g.outgoing(u)) {
      const RoadEdge& edge = g.edge(e);
      const double nd = d + edge.length_meters;
      if (nd < dist[edge.dst]) {
        dist[edge.dst] = nd;
        pred[edge.dst] = u;
        queue.emplace(nd, edge.dst);
      }
    }
  }
}

}  // namespace

void check_spec(const CitySpec& s) {
  auto bad = [](const std::string& what) { fail(ErrorKind::kValidation, "city spec: " + what); };
  if (s.grid_w < 2 || s.grid_h < 2) bad("grid_w and grid_h must be >= 2");
  if (!(s.counter_fraction >= 0.0 && s.counter_fraction <= 1.0)) bad("counter_fraction must be in [0,1]");
  if (s.k_nearest < 1) bad("k_nearest must be >= 1");
  if (!(s.curve_nodes >= 0.0) || !std::isfinite(s.curve_nodes)) bad("curve_nodes must be >= 0");
  if (s.n_supernodes < 0 || s.n_supernodes > s.grid_w * s.grid_h) {
    bad("n_supernodes must be in [0, grid_w*grid_h]");
  }
  if (s.num_samples < 0) bad("num_samples must be >= 0");
  if (s.num_classes < 2) bad("num_classes must be >= 2");
  if (!(s.block_meters > 0.0)) bad("block_meters must be positive");
}

Json spec_to_json(const CitySpec& s) {
  return Json{{"grid_w", s.grid_w},
              {"grid_h", s.grid_h},
              {"curve_nodes", s.curve_nodes},
              {"counter_fraction", s.counter_fraction},
              {"k_nearest", s.k_nearest},
              {"n_supernodes", s.n_supernodes},
              {"seed", s.seed},
              {"num_samples", s.num_samples},
              {"num_classes", s.num_classes},
              {"block_meters", s.block_meters}};
}

CitySpec spec_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "city spec: expected an object");
  CitySpec s;
  try {
    s.grid_w = j.value("grid_w", s.grid_w);
    s.grid_h = j.value("grid_h", s.grid_h);
    s.curve_nodes = j.value("curve_nodes", s.curve_nodes);
    s.counter_fraction = j.value("counter_fraction", s.counter_fraction);
    s.k_nearest = j.value("k_nearest", s.k_nearest);
    s.n_supernodes = j.value("n_supernodes", s.n_supernodes);
    s.seed = j.value("seed", s.seed);
    s.num_samples = j.value("num_samples", s.num_samples);
    s.num_classes = j.value("num_classes", s.num_classes);
    s.block_meters = j.value("block_meters", s.block_meters);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("city spec: ") + e.what());
  }
  return s;
}

Dataset generate_city(const CitySpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const int w = spec.grid_w, h = spec.grid_h;
  const double block = spec.block_meters;

  std::vector<Point> pos;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      pos.push_back({c * block + rng.uniform(-0.1, 0.1) * block,
                     r * block + rng.uniform(-0.1, 0.1) * block});
    }
  }

  std::vector<RoadEdge> edges;
  auto add_street = [&](NodeId a, NodeId b, bool arterial) {
    const double importance = arterial ? 4.0 : static_cast<double>(1 + rng.uniform_index(3));
    const double speed = 20.0 + 10.0 * importance;
    const int bends = rng.poisson(spec.curve_nodes);
    const Point pa = pos[a], pb = pos[b];
    const double dx = pb.x - pa.x, dy = pb.y - pa.y;
    const double len = std::hypot(dx, dy);
    std::vector<NodeId> chain{a};
    for (int i = 0; i < bends; ++i) {
      const double f = static_cast<double>(i + 1) / (bends + 1);
      const double off = rng.uniform(-0.15, 0.15) * block;
      pos.push_back({pa.x + f * dx - off * dy / len, pa.y + f * dy + off * dx / len});
      chain.push_back(static_cast<NodeId>(pos.size() - 1));
    }
    chain.push_back(b);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const double piece = distance(pos[chain[i]], pos[chain[i + 1]]);
      edges.push_back({chain[i], chain[i + 1], speed, importance, piece});
      edges.push_back({chain[i + 1], chain[i], speed, importance, piece});
    }
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto v = static_cast<NodeId>(r * w + c);
      if (c + 1 < w) add_street(v, v + 1, r % 3 == 0);
      if (r + 1 < h) add_street(v, static_cast<NodeId>(v + w), c % 3 == 0);
    }
  }

  std::vector<NodeId> supernodes(static_cast<std::size_t>(w * h));
  for (NodeId v = 0; v < supernodes.size(); ++v) supernodes[v] = v;
  rng.shuffle(supernodes);
  supernodes.resize(static_cast<std::size_t>(spec.n_supernodes));
  std::sort(supernodes.begin(), supernodes.end());
  std::vector<int> supernode_rank(pos.size(), -1);
  for (std::size_t i = 0; i < supernodes.size(); ++i) supernode_rank[supernodes[i]] = static_cast<int>(i);

  std::vector<RoadNode> nodes;
  nodes.reserve(pos.size());
  for (NodeId v = 0; v < pos.size(); ++v) {
    const bool counter = rng.bernoulli(spec.counter_fraction) || supernode_rank[v] >= 0;
    nodes.push_back({kLon0 + pos[v].x / kMetersPerLon, kLat0 + pos[v].y / kMetersPerLat, counter});
  }

  Dataset out;
  out.graph = RoadGraph(std::move(nodes), std::move(edges));
  const RoadGraph& g = out.graph;

  const int k = std::min<int>(spec.k_nearest, static_cast<int>(supernodes.size()) - 1);
  std::vector<double> dist;
  std::vector<NodeId> pred;
  for (NodeId s : supernodes) {
    if (k <= 0) break;
    shortest_paths(g, s, dist, pred);
    std::vector<NodeId> targets;
    for (NodeId t : supernodes) {
      if (t != s && std::isfinite(dist[t])) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end(), [&](NodeId a, NodeId b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    if (targets.size() > static_cast<std::size_t>(k)) targets.resize(static_cast<std::size_t>(k));
    for (NodeId t : targets) {
      Supersegment seg;
      for (NodeId v = t; v != s; v = pred[v]) seg.path.push_back(v);
      seg.path.push_back(s);
      std::reverse(seg.path.begin(), seg.path.end());
      out.segments.segments.push_back(std::move(seg));
    }
  }

  // Edge ids of each segment's path, computed once.
  std::vector<std::vector<EdgeId>> seg_edges;
  for (const auto& seg : out.segments.segments) {
    std::vector<EdgeId> ids;
    for (std::size_t i = 0; i + 1 < seg.path.size(); ++i) {
      ids.push_back(*g.find_edge(seg.path[i], seg.path[i + 1]));
    }
    seg_edges.push_back(std::move(ids));
  }

  for (int t = 0; t < spec.num_samples; ++t) {
    Sample sample = empty_sample(g, out.segments.size(), t);
    const int demand = 1 + static_cast<int>(rng.uniform_index(2));
    std::vector<int> intensity(supernodes.size());
    for (auto& i : intensity) i = static_cast<int>(rng.uniform_index(3));

    std::vector<int> flow(g.num_edges(), 0);
    for (std::size_t s = 0; s < seg_edges.size(); ++s) {
      const int f = demand * intensity[supernode_rank[out.segments.segments[s].head()]];
      for (EdgeId e : seg_edges[s]) flow[e] += f;
    }
    std::vector<int> cls(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      cls[e] = std::min(spec.num_classes - 1, flow[e] / 2);
      sample.edge_labels[e] = cls[e];
    }

    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (!g.node(v).has_counter) continue;
      const bool is_super = supernode_rank[v] >= 0;
      const int level = is_super ? intensity[supernode_rank[v]] : 0;
      for (std::size_t i = 0; i < kNumIntervals; ++i) {
        const bool missing = !is_super && rng.bernoulli(kCounterMissingRate);
        if (!missing) sample.counts[v][i] = (10.0 + 40.0 * level) * demand * kIntervalScale[i];
      }
    }

    for (std::size_t s = 0; s < seg_edges.size(); ++s) {
      double eta = 0.0;
      for (EdgeId e : seg_edges[s]) {
        const RoadEdge& edge = g.edge(e);
        eta += edge.length_meters / (edge.parsed_maxspeed / 3.6) * congestion_factor(cls[e]);
      }
      sample.segment_etas[s] = eta;
    }
    out.samples.push_back(std::move(sample));
  }
  return out;
}

double brute_force_eta(const RoadGraph& graph, const Supersegment& segment,
                       const Sample& sample) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < segment.path.size(); ++i) {
    const auto e = graph.find_edge(segment.path[i], segment.path[i + 1]);
    if (!e) fail(ErrorKind::kValidation, "segment path has no edge");
    const RoadEdge& edge = graph.edge(*e);
    const int cls = sample.edge_labels.at(*e).value_or(0);
    total += edge.length_meters / (edge.parsed_maxspeed / 3.6) * congestion_factor(cls);
  }
  return total;
}

}  // namespace t4c::synth
