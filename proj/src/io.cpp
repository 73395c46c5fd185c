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

#include "t4c/io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "t4c/error.hpp"

namespace t4c {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

Json parse_json(std::string_view text, std::string_view source_name) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source_name << ":" << line << ":" << column << ": " << e.what();
    fail(ErrorKind::kParse, msg.str());
  }
}

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::kParse, where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::kParse, where + ": missing key '" + key + "'");
  return *it;
}

const Json& array_field(const Json& obj, const char* key, const std::string& where) {
  const Json& arr = field(obj, key, where);
  if (!arr.is_array()) fail(ErrorKind::kParse, where + "." + key + ": expected an array");
  return arr;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorKind::kParse, where + ": expected a number");
  return j.get<double>();
}

std::uint32_t index(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 ||
      j.get<std::int64_t>() > UINT32_MAX) {
    fail(ErrorKind::kParse, where + ": expected a non-negative integer id");
  }
  return j.get<std::uint32_t>();
}

std::string at(const char* name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

}  // namespace

Json dataset_to_json(const Dataset& dataset) {
  const RoadGraph& g = dataset.graph;
  Json nodes = Json::array();
  std::vector<NodeId> counter_nodes;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const RoadNode& n = g.node(v);
    nodes.push_back({{"x", n.x}, {"y", n.y}, {"counter", n.has_counter}});
    if (n.has_counter) counter_nodes.push_back(v);
  }
  Json edges = Json::array();
  for (const RoadEdge& e : g.edges()) {
    edges.push_back({{"src", e.src},
                     {"dst", e.dst},
                     {"parsed_maxspeed", e.parsed_maxspeed},
                     {"importance", e.importance},
                     {"length_meters", e.length_meters}});
  }
  Json segments = Json::array();
  for (const auto& s : dataset.segments.segments) {
    segments.push_back({{"nodes", s.path}});
  }
  Json samples = Json::array();
  for (const Sample& sample : dataset.samples) {
    Json counts = Json::array();
    for (NodeId v : counter_nodes) {
      Json row = Json::array();
      if (v < sample.counts.size()) {
        for (const auto& c : sample.counts[v]) row.push_back(c ? Json(*c) : Json(nullptr));
      } else {
        for (std::size_t i = 0; i < kNumIntervals; ++i) row.push_back(nullptr);
      }
      counts.push_back(std::move(row));
    }
    Json labels = Json::array();
    for (const auto& l : sample.edge_labels) labels.push_back(l ? Json(*l) : Json(nullptr));
    Json etas = Json::array();
    for (const auto& eta : sample.segment_etas) etas.push_back(eta ? Json(*eta) : Json(nullptr));
    samples.push_back({{"t", sample.t},
                       {"counts", std::move(counts)},
                       {"edge_labels", std::move(labels)},
                       {"segment_etas", std::move(etas)}});
  }
  return Json{{"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"supersegments", std::move(segments)},
              {"samples", std::move(samples)}};
}

Dataset dataset_from_json(const Json& json) {
  std::vector<RoadNode> nodes;
  const Json& jnodes = array_field(json, "nodes", "dataset");
  nodes.reserve(jnodes.size());
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string where = at("nodes", i);
    RoadNode n;
    n.x = number(field(jnodes[i], "x", where), where + ".x");
    n.y = number(field(jnodes[i], "y", where), where + ".y");
    const Json& counter = field(jnodes[i], "counter", where);
    if (!counter.is_boolean()) fail(ErrorKind::kParse, where + ".counter: expected a boolean");
    n.has_counter = counter.get<bool>();
    nodes.push_back(n);
  }

  std::vector<RoadEdge> edges;
  const Json& jedges = array_field(json, "edges", "dataset");
  edges.reserve(jedges.size());
  for (std::size_t i = 0; i < jedges.size(); ++i) {
    const std::string where = at("edges", i);
    const Json& je = jedges[i];
    RoadEdge e;
    e.src = index(field(je, "src", where), where + ".src");
    e.dst = index(field(je, "dst", where), where + ".dst");
    e.parsed_maxspeed = number(field(je, "parsed_maxspeed", where), where + ".parsed_maxspeed");
    e.importance = number(field(je, "importance", where), where + ".importance");
    e.length_meters = number(field(je, "length_meters", where), where + ".length_meters");
    edges.push_back(e);
  }

  Dataset out;
  const Json& jsegs = array_field(json, "supersegments", "dataset");
  for (std::size_t i = 0; i < jsegs.size(); ++i) {
    const std::string where = at("supersegments", i);
    const Json& path = array_field(jsegs[i], "nodes", where);
    Supersegment s;
    for (std::size_t k = 0; k < path.size(); ++k) {
      s.path.push_back(index(path[k], where + ".nodes"));
    }
    out.segments.segments.push_back(std::move(s));
  }

  std::vector<NodeId> counter_nodes;
  for (NodeId v = 0; v < nodes.size(); ++v) {
    if (nodes[v].has_counter) counter_nodes.push_back(v);
  }

  const Json& jsamples = array_field(json, "samples", "dataset");
  for (std::size_t k = 0; k < jsamples.size(); ++k) {
    const std::string where = at("samples", k);
    const Json& js = jsamples[k];
    Sample sample;
    const Json& t = field(js, "t", where);
    if (!t.is_number_integer()) fail(ErrorKind::kParse, where + ".t: expected an integer");
    sample.t = t.get<std::int64_t>();

    const Json& counts = array_field(js, "counts", where);
    if (counts.size() == counter_nodes.size()) {
      sample.counts.assign(nodes.size(), CounterReading{});
      for (std::size_t c = 0; c < counts.size(); ++c) {
        const std::string cw = where + ".counts[" + std::to_string(c) + "]";
        if (!counts[c].is_array() || counts[c].size() != kNumIntervals) {
          fail(ErrorKind::kParse, cw + ": expected an array of 4 values");
        }
        for (std::size_t i = 0; i < kNumIntervals; ++i) {
          if (!counts[c][i].is_null()) {
            sample.counts[counter_nodes[c]][i] = number(counts[c][i], cw);
          }
        }
      }
    } else {
      // Leave the length short so validate() reports the mismatch.
      sample.counts.assign(counts.size(), CounterReading{});
    }

    const Json& labels = array_field(js, "edge_labels", where);
    for (const Json& l : labels) {
      if (l.is_null()) {
        sample.edge_labels.emplace_back();
      } else {
        if (!l.is_number_integer()) fail(ErrorKind::kParse, where + ".edge_labels: expected int or null");
        sample.edge_labels.emplace_back(l.get<int>());
      }
    }
    const Json& etas = array_field(js, "segment_etas", where);
    for (const Json& eta : etas) {
      if (eta.is_null()) {
        sample.segment_etas.emplace_back();
      } else {
        sample.segment_etas.emplace_back(number(eta, where + ".segment_etas"));
      }
    }
    out.samples.push_back(std::move(sample));
  }
  out.graph = RoadGraph(std::move(nodes), std::move(edges));
  return out;
}

std::string serialize_dataset(const Dataset& dataset) {
  return dataset_to_json(dataset).dump() + "\n";
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Dataset dataset = dataset_from_json(parse_json(text, path.string()));
  require_valid(dataset);
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  require_valid(dataset);
  write_file(path, serialize_dataset(dataset));
}

}  // namespace t4c
