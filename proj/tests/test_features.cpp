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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>

#include "t4c/error.hpp"
#include "t4c/features.hpp"
#include "t4c/io.hpp"
#include "t4c/supergraph.hpp"
#include "t4c/synth.hpp"
#include "test_util.hpp"

namespace t4c {
namespace {

using features::FeatureConfig;
using features::Tensor;

TEST(NodeFeatures, SingleNodeIsCentered) {
  RoadGraph g({{13.4, 52.5, false}}, {});
  FeatureConfig cfg;
  cfg.count_scale = 1.0;
  const Tensor f = features::node_features(g, empty_sample(g, 0), cfg);
  ASSERT_EQ(f.rows, 1u);
  ASSERT_EQ(f.cols, 14u);
  EXPECT_EQ(f.at(0, 0), 0.5);
  EXPECT_EQ(f.at(0, 1), 0.5);
}

TEST(NodeFeatures, HandComputedCounts) {
  RoadGraph g({{0.0, 0.0, true}, {2.0, 4.0, true}}, {testing::edge(0, 1)});
  Sample s = empty_sample(g, 0);
  s.counts[0] = {4.0, 8.0, 12.0, 16.0};
  FeatureConfig cfg;
  cfg.count_scale = 16.0;
  const Tensor f = features::node_features(g, s, cfg);
  const double row0[14] = {0, 0, 0.25, 0.5, 0.75, 1.0, 0.25, 0.5, 0.75, 1.0, 0, 0, 0, 0};
  const double row1[14] = {1, 1, -1, -1, -1, -1, 0.25, 0.5, 0.75, 1.0, 0, 0, 0, 0};
  for (std::size_t c = 0; c < 14; ++c) {
    EXPECT_EQ(f.at(0, c), row0[c]) << "col " << c;
    EXPECT_EQ(f.at(1, c), row1[c]) << "col " << c;
  }
}

TEST(NodeFeatures, PopulationStd) {
  RoadGraph g({{0, 0, true}, {1, 0, true}, {2, 0, true}}, {});
  Sample s = empty_sample(g, 0);
  s.counts[0] = {2.0, 2.0, 2.0, 2.0};
  s.counts[1] = {4.0, std::nullopt, 2.0, 2.0};
  s.counts[2] = {6.0, std::nullopt, 2.0, std::nullopt};
  FeatureConfig cfg;
  cfg.count_scale = 2.0;
  const Tensor f = features::node_features(g, s, cfg);
  EXPECT_DOUBLE_EQ(f.at(0, 6), 2.0);
  EXPECT_DOUBLE_EQ(f.at(0, 10), std::sqrt(2.0 / 3.0));
  EXPECT_DOUBLE_EQ(f.at(0, 7), 1.0);
  EXPECT_DOUBLE_EQ(f.at(0, 11), 0.0);
  EXPECT_DOUBLE_EQ(f.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(f.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.at(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.at(2, 1), 0.5);
}

TEST(NodeFeatures, AllMissing) {
  const Dataset d = synth::generate_city(testing::small_spec(1));
  const Sample s = empty_sample(d.graph, d.segments.size());
  FeatureConfig cfg;
  cfg.count_scale = 1.0;
  const Tensor f = features::node_features(d.graph, s, cfg);
  for (std::size_t r = 0; r < f.rows; ++r) {
    for (std::size_t c = 2; c < 6; ++c) EXPECT_EQ(f.at(r, c), -1.0);
    for (std::size_t c = 6; c < 14; ++c) EXPECT_EQ(f.at(r, c), 0.0);
  }
}

TEST(NodeFeatures, ContractOnSynthCity) {
  const Dataset d = synth::generate_city(testing::small_spec(2, 5, 4));
  const auto cfg = features::resolve(FeatureConfig{}, d.samples);
  for (const Sample& s : d.samples) {
    const Tensor f = features::node_features(d.graph, s, cfg);
    ASSERT_EQ(f.rows, d.graph.num_nodes());
    ASSERT_EQ(f.cols, 14u);
    for (double v : f.data) ASSERT_TRUE(std::isfinite(v));
    for (std::size_t r = 0; r < f.rows; ++r) {
      EXPECT_GE(f.at(r, 0), 0.0);
      EXPECT_LE(f.at(r, 0), 1.0);
      EXPECT_GE(f.at(r, 1), 0.0);
      EXPECT_LE(f.at(r, 1), 1.0);
      for (std::size_t c = 6; c < 14; ++c) EXPECT_EQ(f.at(r, c), f.at(0, c));
    }
    EXPECT_EQ(f, features::node_features(d.graph, s, cfg));
  }
}

TEST(EdgeFeatures, HandComputed) {
  RoadGraph g({{0, 0, false}, {1, 0, false}}, {testing::edge(0, 1, 50.0, 2.0, 100.0)});
  FeatureConfig cfg;
  cfg.speed_scale = 100.0;
  cfg.importance_scale = 5.0;
  cfg.length_scale = 1000.0;
  const Tensor f = features::edge_features(g, cfg);
  ASSERT_EQ(f.rows, 1u);
  ASSERT_EQ(f.cols, 4u);
  EXPECT_DOUBLE_EQ(f.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.at(0, 1), 0.4);
  EXPECT_DOUBLE_EQ(f.at(0, 2), 0.1);
  EXPECT_DOUBLE_EQ(f.at(0, 3), 0.2);
}

TEST(EdgeFeatures, UnitScalesPassThrough) {
  RoadGraph g({{0, 0, false}, {1, 0, false}}, {testing::edge(0, 1, 40.0, 3.0, 120.0)});
  FeatureConfig cfg;
  cfg.speed_scale = cfg.importance_scale = cfg.length_scale = 1.0;
  const Tensor f = features::edge_features(g, cfg);
  EXPECT_EQ(f.data, (std::vector<double>{40.0, 3.0, 120.0, 3.0}));
}

TEST(EdgeFeatures, EmptyEdgeSet) {
  RoadGraph g({{0, 0, false}}, {});
  const Tensor f = features::edge_features(g, FeatureConfig{});
  EXPECT_EQ(f.rows, 0u);
  EXPECT_EQ(f.cols, 4u);
}

TEST(ExtendedFeatures, Rules) {
  const Dataset d = synth::generate_city(testing::small_spec(3, 4, 4));
  const auto cfg = features::resolve(FeatureConfig{}, d.samples);
  const Tensor base = features::node_features(d.graph, d.samples[0], cfg);
  EXPECT_EQ(features::extended_features(supergraph::build_approach1(d.graph, d.segments), base), base);
  const auto x = supergraph::build_approach2(d.graph, d.segments);
  const Tensor f = features::extended_features(x, base);
  ASSERT_EQ(f.rows, base.rows + d.segments.size());
  for (std::size_t r = base.rows; r < f.rows; ++r) {
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(f.at(r, c), 0.0);
    for (std::size_t c = 6; c < 14; ++c) EXPECT_EQ(f.at(r, c), base.at(0, c));
  }
  EXPECT_THROW(features::extended_features(x, Tensor(2, 14)), Error);
}

TEST(Config, ResolveUsesMaxKnownCount) {
  const Dataset d = synth::generate_city(testing::small_spec(4));
  double best = 0.0;
  for (const auto& s : d.samples) {
    for (const auto& r : s.counts) {
      for (const auto& c : r) {
        if (c) best = std::max(best, *c);
      }
    }
  }
  EXPECT_EQ(*features::resolve(FeatureConfig{}, d.samples).count_scale, best);
  FeatureConfig fixed;
  fixed.count_scale = 3.0;
  EXPECT_EQ(*features::resolve(fixed, d.samples).count_scale, 3.0);
}

TEST(Config, RejectsNonPositiveScales) {
  FeatureConfig cfg;
  cfg.speed_scale = 0.0;
  EXPECT_THROW(features::check_config(cfg), Error);
  EXPECT_THROW(features::config_from_json(Json{{"length_scale", -1.0}}), Error);
}

TEST(Binary, HeaderAndLittleEndianF32) {
  Tensor node(1, 2, std::vector<double>{1.0, -0.5});
  Tensor edge(2, 1, std::vector<double>{0.25, 3.0});
  const std::string bytes = features::encode_binary(node, edge);
  ASSERT_EQ(bytes.size(), 8u + 8u + 8u + 8u);
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(i)]);
    return v;
  };
  auto f32 = [&](std::size_t off) { return std::bit_cast<float>(u32(off)); };
  EXPECT_EQ(u32(0), 1u);
  EXPECT_EQ(u32(4), 2u);
  EXPECT_EQ(f32(8), 1.0f);
  EXPECT_EQ(f32(12), -0.5f);
  EXPECT_EQ(u32(16), 2u);
  EXPECT_EQ(u32(20), 1u);
  EXPECT_EQ(f32(24), 0.25f);
  EXPECT_EQ(f32(28), 3.0f);
  // Golden bytes for 1.0f.
  EXPECT_EQ(bytes.substr(8, 4), std::string("\x00\x00\x80\x3f", 4));
}

}  // namespace
}  // namespace t4c
