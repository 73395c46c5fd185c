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

#include <cmath>
#include <limits>

#include "t4c/error.hpp"
#include "t4c/io.hpp"
#include "t4c/synth.hpp"
#include "test_util.hpp"

namespace t4c {
namespace {

using testing::edge;

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(Graph, AdjacencyMatchesEdgeRecords) {
  const Dataset d = synth::generate_city(testing::small_spec(5, 4, 3));
  const RoadGraph& g = d.graph;
  std::vector<std::size_t> mentioned(g.num_nodes(), 0);
  for (const RoadEdge& e : g.edges()) {
    ++mentioned[e.src];
    ++mentioned[e.dst];
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    EXPECT_EQ(g.incoming(v).size() + g.outgoing(v).size(), mentioned[v]);
    for (EdgeId e : g.incoming(v)) EXPECT_EQ(g.edge(e).dst, v);
    for (EdgeId e : g.outgoing(v)) EXPECT_EQ(g.edge(e).src, v);
  }
}

TEST(Graph, FindEdgeIsDirected) {
  RoadGraph g({{0, 0, false}, {1, 0, false}}, {edge(0, 1)});
  EXPECT_EQ(g.find_edge(0, 1), EdgeId{0});
  EXPECT_FALSE(g.find_edge(1, 0).has_value());
}

TEST(Validate, MinimalFileLoads) {
  const std::string text =
      R"({"nodes":[{"x":0,"y":0,"counter":false},{"x":1,"y":1,"counter":false}],)"
      R"("edges":[{"src":0,"dst":1,"parsed_maxspeed":50,"importance":1,"length_meters":10}],)"
      R"("supersegments":[],"samples":[]})";
  const Dataset d = dataset_from_json(parse_json(text, "minimal"));
  EXPECT_EQ(d.graph.num_nodes(), 2u);
  EXPECT_EQ(d.graph.num_edges(), 1u);
  EXPECT_TRUE(d.segments.empty());
  EXPECT_TRUE(validate(d).ok());
}

TEST(Validate, DuplicateEdgeIsReported) {
  Dataset d;
  d.graph = RoadGraph({{0, 0, false}, {1, 1, false}}, {edge(0, 1), edge(0, 1)});
  const auto r = validate(d);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "duplicate edge"));
  try {
    require_valid(d);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("duplicate edge"), std::string::npos);
  }
}

TEST(Validate, EdgeInvariants) {
  Dataset d;
  d.graph = RoadGraph({{0, 0, false}, {1, 1, false}},
                      {edge(0, 0), edge(0, 1, 0.0), edge(1, 0, 50, 1, -1), edge(0, 5)});
  const auto r = validate(d);
  EXPECT_EQ(r.violations.size(), 4u);
}

TEST(Validate, BrokenSegmentNamesTheSegment) {
  Dataset d;
  d.graph = testing::chain(4);
  d.segments.segments = {{{0, 1, 2}}, {{0, 2}}};
  const auto r = validate(d);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_NE(r.violations[0].find("supersegments[1]"), std::string::npos) << r.violations[0];
}

TEST(Validate, WrongCountLengthIsOneViolation) {
  Dataset d;
  d.graph = testing::chain(3);
  Sample s = empty_sample(d.graph, 0);
  s.counts.pop_back();
  d.samples.push_back(s);
  EXPECT_EQ(validate(d).violations.size(), 1u);
}

TEST(Validate, SampleValueRanges) {
  Dataset d;
  d.graph = RoadGraph({{0, 0, true}, {1, 1, false}}, {edge(0, 1), edge(1, 0)});
  d.segments.segments = {{{0, 1}}};
  Sample s = empty_sample(d.graph, 1);
  s.counts[0][0] = -1.0;
  s.counts[1][0] = 3.0;  // not a counter node
  s.edge_labels[0] = -2;
  s.segment_etas[0] = 0.0;
  d.samples.push_back(s);
  EXPECT_EQ(validate(d).violations.size(), 4u);
}

TEST(Validate, SynthOutputIsValidForManySeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto spec = testing::small_spec(seed, 2 + static_cast<int>(seed % 4), 2 + static_cast<int>(seed % 3));
    spec.curve_nodes = static_cast<double>(seed % 3);
    const auto r = validate(synth::generate_city(spec));
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.violations.front();
  }
}

TEST(Io, RoundTripIsBitIdentical) {
  auto spec = testing::small_spec(7, 4, 4);
  const Dataset d = synth::generate_city(spec);
  const std::string a = serialize_dataset(d);
  const Dataset back = dataset_from_json(parse_json(a, "a"));
  EXPECT_EQ(back, d);
  EXPECT_EQ(serialize_dataset(back), a);
}

TEST(Io, SaveLoadThroughFiles) {
  const auto dir = testing::temp_dir("io");
  const Dataset d = synth::generate_city(testing::small_spec(3));
  save_dataset(d, dir / "city.json");
  EXPECT_EQ(load_dataset(dir / "city.json"), d);
}

TEST(Io, EmptySamplesStillLoad) {
  Dataset d = synth::generate_city(testing::small_spec(1));
  d.samples.clear();
  const Dataset back = dataset_from_json(parse_json(serialize_dataset(d), "x"));
  EXPECT_TRUE(back.samples.empty());
  EXPECT_EQ(back, d);
}

TEST(Io, NanCoordinateIsRefused) {
  const auto dir = testing::temp_dir("nan");
  Dataset d;
  d.graph = RoadGraph({{std::numeric_limits<double>::quiet_NaN(), 0, false}, {1, 1, false}},
                      {edge(0, 1)});
  try {
    save_dataset(d, dir / "bad.json");
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "bad.json"));
}

TEST(Io, ParseErrorCarriesLineContext) {
  try {
    parse_json("{\n  \"nodes\": [\n  oops\n]}", "broken.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    const std::string what = e.what();
    EXPECT_NE(what.find("broken.json"), std::string::npos);
    EXPECT_NE(what.find("broken.json:3:"), std::string::npos) << what;
  }
}

TEST(Io, MissingFileIsIoError) {
  try {
    load_dataset("/nonexistent/t4c/city.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Io, CountsStoredOnlyForCounterNodes) {
  const Dataset d = synth::generate_city(testing::small_spec(2));
  const Json j = dataset_to_json(d);
  std::size_t counters = 0;
  for (const auto& n : d.graph.nodes()) counters += n.has_counter ? 1 : 0;
  ASSERT_FALSE(j["samples"].empty());
  EXPECT_EQ(j["samples"][0]["counts"].size(), counters);
}

}  // namespace
}  // namespace t4c
