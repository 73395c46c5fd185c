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

#include <filesystem>
#include <optional>
#include <span>

#include "t4c/graph.hpp"
#include "t4c/io.hpp"
#include "t4c/nn/tensor.hpp"
#include "t4c/supergraph.hpp"

namespace t4c::features {

using nn::Tensor;

inline constexpr std::size_t kNodeFeatures = 14;
inline constexpr std::size_t kEdgeFeatures = 4;

// Column layout of the node feature matrix.
inline constexpr std::size_t kColX = 0;
inline constexpr std::size_t kColY = 1;
inline constexpr std::size_t kColCounts = 2;  // 4 columns
inline constexpr std::size_t kColMean = 6;    // 4 columns
inline constexpr std::size_t kColStd = 10;    // 4 columns

struct FeatureConfig {
  // Unset means "max known count over the samples it is resolved from".
  std::optional<double> count_scale;
  double speed_scale = 120.0;
  double importance_scale = 5.0;
  double length_scale = 10000.0;
  double missing_value = -1.0;
};

void check_config(const FeatureConfig& cfg);
Json config_to_json(const FeatureConfig& cfg);
FeatureConfig config_from_json(const Json& json);

// Largest known count over `samples`, or 1 when nothing is known.
double max_known_count(std::span<const Sample> samples);
FeatureConfig resolve(FeatureConfig cfg, std::span<const Sample> samples);

// (N, 14): normalized x, y; normalized counts (missing_value where unknown);
// per-interval mean and population std over the known normalized counts,
// repeated on every row. A degenerate coordinate range maps to 0.5. Sums run
// over sorted values so node order never changes a bit.
Tensor node_features(const RoadGraph& graph, const Sample& sample, const FeatureConfig& cfg);

// (E, 4): maxspeed, importance, length, and length/maxspeed, each scaled.
Tensor edge_features(const RoadGraph& graph, const FeatureConfig& cfg);

// Appends one row per extra node: zeros except the global statistics.
Tensor extended_features(const supergraph::ExtendedGraph& extended, const Tensor& node_feats);

// Two blocks, nodes then edges, each a little-endian u32 rows, u32 cols
// header followed by rows*cols little-endian f32 values in row-major order.
std::string encode_binary(const Tensor& node_feats, const Tensor& edge_feats);
void write_binary(const std::filesystem::path& path, const Tensor& node_feats,
                  const Tensor& edge_feats);

}  // namespace t4c::features
