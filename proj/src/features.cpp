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

#include "t4c/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "t4c/error.hpp"

namespace t4c::features {

void check_config(const FeatureConfig& cfg) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if ((cfg.count_scale && !positive(*cfg.count_scale)) || !positive(cfg.speed_scale) ||
      !positive(cfg.importance_scale) || !positive(cfg.length_scale)) {
    fail(ErrorKind::kValidation, "feature config: all scales must be positive");
  }
  if (!std::isfinite(cfg.missing_value)) {
    fail(ErrorKind::kValidation, "feature config: missing_value must be finite");
  }
}

Json config_to_json(const FeatureConfig& cfg) {
  return Json{{"count_scale", cfg.count_scale ? Json(*cfg.count_scale) : Json(nullptr)},
              {"speed_scale", cfg.speed_scale},
              {"importance_scale", cfg.importance_scale},
              {"length_scale", cfg.length_scale},
              {"missing_value", cfg.missing_value}};
}

FeatureConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "feature config: expected an object");
  FeatureConfig cfg;
  try {
    if (j.contains("count_scale") && !j["count_scale"].is_null()) {
      cfg.count_scale = j["count_scale"].get<double>();
    }
    cfg.speed_scale = j.value("speed_scale", cfg.speed_scale);
    cfg.importance_scale = j.value("importance_scale", cfg.importance_scale);
    cfg.length_scale = j.value("length_scale", cfg.length_scale);
    cfg.missing_value = j.value("missing_value", cfg.missing_value);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("feature config: ") + e.what());
  }
  check_config(cfg);
  return cfg;
}

double max_known_count(std::span<const Sample> samples) {
  double best = 0.0;
  for (const Sample& s : samples) {
    for (const auto& reading : s.counts) {
      for (const auto& c : reading) {
        if (c) best = std::max(best, *c);
      }
    }
  }
  return best > 0.0 ? best : 1.0;
}

FeatureConfig resolve(FeatureConfig cfg, std::span<const Sample> samples) {
  if (!cfg.count_scale) cfg.count_scale = max_known_count(samples);
  check_config(cfg);
  return cfg;
}

namespace {

double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

Tensor node_features(const RoadGraph& graph, const Sample& sample, const FeatureConfig& cfg) {
  if (!cfg.count_scale) fail(ErrorKind::kUsage, "node_features: count_scale is unresolved");
  const std::size_t n = graph.num_nodes();
  if (sample.counts.size() != n) fail(ErrorKind::kValidation, "node_features: sample does not match graph");
  Tensor out(n, kNodeFeatures);
  if (n == 0) return out;

  double min_x = graph.node(0).x, max_x = min_x, min_y = graph.node(0).y, max_y = min_y;
  for (const RoadNode& node : graph.nodes()) {
    min_x = std::min(min_x, node.x);
    max_x = std::max(max_x, node.x);
    min_y = std::min(min_y, node.y);
    max_y = std::max(max_y, node.y);
  }
  auto normalize = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };

  std::vector<double> known[kNumIntervals];
  for (NodeId v = 0; v < n; ++v) {
    out.at(v, kColX) = normalize(graph.node(v).x, min_x, max_x);
    out.at(v, kColY) = normalize(graph.node(v).y, min_y, max_y);
    for (std::size_t i = 0; i < kNumIntervals; ++i) {
      const auto& c = sample.counts[v][i];
      if (c) {
        const double value = *c / *cfg.count_scale;
        out.at(v, kColCounts + i) = value;
        known[i].push_back(value);
      } else {
        out.at(v, kColCounts + i) = cfg.missing_value;
      }
    }
  }

  for (std::size_t i = 0; i < kNumIntervals; ++i) {
    double mean = 0.0, stddev = 0.0;
    if (!known[i].empty()) {
      const auto count = static_cast<double>(known[i].size());
      mean = sorted_sum(known[i]) / count;
      std::vector<double> sq;
      sq.reserve(known[i].size());
      for (double v : known[i]) sq.push_back((v - mean) * (v - mean));
      stddev = std::sqrt(sorted_sum(sq) / count);
    }
    for (NodeId v = 0; v < n; ++v) {
      out.at(v, kColMean + i) = mean;
      out.at(v, kColStd + i) = stddev;
    }
  }
  return out;
}

Tensor edge_features(const RoadGraph& graph, const FeatureConfig& cfg) {
  Tensor out(graph.num_edges(), kEdgeFeatures);
  const double time_scale = cfg.length_scale / cfg.speed_scale;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const RoadEdge& edge = graph.edge(e);
    out.at(e, 0) = edge.parsed_maxspeed / cfg.speed_scale;
    out.at(e, 1) = edge.importance / cfg.importance_scale;
    out.at(e, 2) = edge.length_meters / cfg.length_scale;
    out.at(e, 3) = (edge.length_meters / edge.parsed_maxspeed) / time_scale;
  }
  return out;
}

Tensor extended_features(const supergraph::ExtendedGraph& extended, const Tensor& node_feats) {
  const std::size_t base = extended.base().num_nodes();
  if (node_feats.rows != base || node_feats.cols != kNodeFeatures) {
    fail(ErrorKind::kValidation, "extended_features: feature rows must match the base node count");
  }
  Tensor out(extended.num_nodes(), kNodeFeatures);
  std::copy(node_feats.data.begin(), node_feats.data.end(), out.data.begin());
  if (base == 0) return out;
  for (std::size_t r = base; r < out.rows; ++r) {
    for (std::size_t c = kColMean; c < kNodeFeatures; ++c) out.at(r, c) = node_feats.at(0, c);
  }
  return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_block(std::string& out, const Tensor& t) {
  put_u32(out, static_cast<std::uint32_t>(t.rows));
  put_u32(out, static_cast<std::uint32_t>(t.cols));
  for (double v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

}  // namespace

std::string encode_binary(const Tensor& node_feats, const Tensor& edge_feats) {
  std::string out;
  out.reserve(16 + 4 * (node_feats.size() + edge_feats.size()));
  put_block(out, node_feats);
  put_block(out, edge_feats);
  return out;
}

void write_binary(const std::filesystem::path& path, const Tensor& node_feats,
                  const Tensor& edge_feats) {
  write_file(path, encode_binary(node_feats, edge_feats));
}

}  // namespace t4c::features
