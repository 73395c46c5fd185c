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

#include <cstdint>

#include "t4c/graph.hpp"
#include "t4c/io.hpp"

namespace t4c::synth {

// Parameters of a synthetic grid city with a planted traffic model.
struct CitySpec {
  int grid_w = 6;
  int grid_h = 6;
  double curve_nodes = 1.0;  // Poisson mean of bend nodes per street
  double counter_fraction = 0.3;
  int k_nearest = 2;
  int n_supernodes = 8;
  std::uint64_t seed = 0;
  int num_samples = 16;
  int num_classes = 3;
  double block_meters = 150.0;
};

void check_spec(const CitySpec& spec);
Json spec_to_json(const CitySpec& spec);
// Missing keys keep their defaults.
CitySpec spec_from_json(const Json& json);

// Grid intersections take ids [0, grid_w*grid_h) in row-major order; bend
// nodes are appended after. Every street exists in both directions.
//
// The planted model, per sample: a demand level D in {1,2} and an intensity
// I in {0,1,2} per supernode. Each supersegment carries flow D*I(head);
// an edge's flow is the sum over segments through it and its class is
// min(C-1, flow/2). Counters report (10 + 40*I)*D scaled per interval (I=0
// off supernodes), so a segment edge's class depends on the counter at the
// segment's head however far away it is.
Dataset generate_city(const CitySpec& spec);

// Travel-time multiplier applied to an edge of the given congestion class.
inline double congestion_factor(int cls) { return 1.0 + 0.5 * cls; }

// ETA by direct traversal of the segment path using the sample's labels.
double brute_force_eta(const RoadGraph& graph, const Supersegment& segment,
                       const Sample& sample);

}  // namespace t4c::synth
