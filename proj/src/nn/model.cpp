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

#include "t4c/nn/model.hpp"

#include <cmath>
#include <cstdio>

#include "t4c/error.hpp"
#include "t4c/features.hpp"

namespace t4c::nn {

using supergraph::Approach;
using supergraph::EdgeRole;

void init_mlp(ParameterStore& params, const std::string& prefix, const MlpSpec& spec, Rng& rng) {
  if (spec.depth < 1) fail(ErrorKind::kValidation, "mlp depth must be >= 1");
  std::size_t in = spec.in_dim;
  for (std::size_t l = 0; l < spec.depth; ++l) {
    const std::size_t out = l + 1 == spec.depth ? spec.out_dim : spec.hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const std::string name = prefix + ".l" + std::to_string(l);
    params.add(name + ".w", in, out, rng, bound);
    params.add(name + ".b", 1, out, rng, bound);
    in = out;
  }
}

Var mlp_forward(Tape& tape, const std::string& prefix, const MlpSpec& spec, Var x) {
  if (tape.value(x).cols != spec.in_dim) {
    fail(ErrorKind::kState, "mlp '" + prefix + "': input has " +
                                std::to_string(tape.value(x).cols) + " columns, expected " +
                                std::to_string(spec.in_dim));
  }
  for (std::size_t l = 0; l < spec.depth; ++l) {
    const std::string name = prefix + ".l" + std::to_string(l);
    x = tape.add_bias(tape.matmul(x, tape.param(name + ".w")), tape.param(name + ".b"));
    if (l + 1 < spec.depth) x = tape.relu(x);
  }
  return x;
}

namespace {

Var aggregate_and_update(Tape& tape, const std::string& prefix, const MlpSpec& update, Var h,
                         Var messages, const EdgeList& edges) {
  const std::size_t n = tape.value(h).rows;
  Var agg = tape.scatter_sum_rows(messages, edges.dst, n);
  return tape.add(h, mlp_forward(tape, prefix + ".update", update, tape.concat_cols({h, agg})));
}

}  // namespace

Var gnn_conv(Tape& tape, const std::string& prefix, const MlpSpec& message,
             const MlpSpec& update, Var h, Var e0, const EdgeList& edges) {
  if (tape.value(e0).rows != edges.size()) fail(ErrorKind::kState, "gnn_conv: edge embeddings do not match edges");
  Var hs = tape.gather_rows(h, edges.src);
  Var hd = tape.gather_rows(h, edges.dst);
  Var m = mlp_forward(tape, prefix + ".message", message, tape.concat_cols({hs, hd, e0}));
  return aggregate_and_update(tape, prefix, update, h, m, edges);
}

Var gnn_pool_conv(Tape& tape, const std::string& prefix, const MlpSpec& message,
                  const MlpSpec& update, Var h, const EdgeList& edges) {
  Var hs = tape.gather_rows(h, edges.src);
  Var hd = tape.gather_rows(h, edges.dst);
  Var m = mlp_forward(tape, prefix + ".message", message, tape.concat_cols({hs, hd}));
  return aggregate_and_update(tape, prefix, update, h, m, edges);
}

std::string layer_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv_on_base";
    case LayerKind::kSuperEdge: return "super_edge_step";
    case LayerKind::kPoolIn: return "pool_in";
    case LayerKind::kPoolOut: return "pool_out";
    case LayerKind::kSegmentLinkOut: return "segment_link_out";
    case LayerKind::kSegmentLinkIn: return "segment_link_in";
  }
  return "";
}

Json model_config_to_json(const ModelConfig& cfg) {
  return Json{{"hidden_dim", cfg.hidden_dim},
              {"mlp_depth", cfg.mlp_depth},
              {"mlp_hidden", cfg.mlp_hidden},
              {"num_classes", cfg.num_classes},
              {"task", cfg.task == Task::kCore ? "core" : "extended"},
              {"share_params", cfg.share_params},
              {"schedule", cfg.schedule},
              {"approach", supergraph::approach_name(cfg.approach)}};
}

ModelConfig model_config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "model config: expected an object");
  ModelConfig cfg;
  try {
    cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
    cfg.mlp_depth = j.value("mlp_depth", cfg.mlp_depth);
    cfg.mlp_hidden = j.value("mlp_hidden", cfg.mlp_hidden);
    cfg.num_classes = j.value("num_classes", cfg.num_classes);
    cfg.share_params = j.value("share_params", cfg.share_params);
    const std::string task = j.value("task", std::string("core"));
    if (task == "core") {
      cfg.task = Task::kCore;
    } else if (task == "extended") {
      cfg.task = Task::kExtended;
    } else {
      fail(ErrorKind::kValidation, "model config: task must be 'core' or 'extended'");
    }
    if (j.contains("schedule")) cfg.schedule = j["schedule"].get<std::vector<std::string>>();
    cfg.approach = supergraph::parse_approach(j.value("approach", std::string("none")));
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("model config: ") + e.what());
  }
  if (cfg.hidden_dim == 0 || cfg.mlp_depth == 0 || cfg.mlp_hidden == 0 || cfg.num_classes < 2) {
    fail(ErrorKind::kValidation, "model config: dimensions must be positive and num_classes >= 2");
  }
  return cfg;
}

std::vector<std::string> default_schedule(Approach approach) {
  const std::string conv = "conv_on_base";
  switch (approach) {
    case Approach::kNone: return {conv, conv, conv, conv, conv, conv};
    case Approach::kSuperEdges: return {conv, conv, conv, conv, "super_edge_step", conv, conv};
    case Approach::kPooling:
    case Approach::kMirrors: return {conv, conv, conv, conv, "pool_step", conv, conv};
    case Approach::kCombined:
      return {conv, conv, "super_edge_step", conv, conv, "super_edge_step", "pool_step", conv, conv};
  }
  return {};
}

std::vector<LayerKind> expand_schedule(const ModelConfig& cfg) {
  const auto& names = cfg.schedule.empty() ? default_schedule(cfg.approach) : cfg.schedule;
  if (names.empty()) fail(ErrorKind::kValidation, "model config: schedule is empty");
  std::vector<LayerKind> out;
  for (const std::string& name : names) {
    if (name == "conv_on_base") {
      out.push_back(LayerKind::kConv);
    } else if (name == "super_edge_step") {
      out.push_back(LayerKind::kSuperEdge);
    } else if (name == "pool_in") {
      out.push_back(LayerKind::kPoolIn);
    } else if (name == "pool_out") {
      out.push_back(LayerKind::kPoolOut);
    } else if (name == "segment_link_out") {
      out.push_back(LayerKind::kSegmentLinkOut);
    } else if (name == "segment_link_in") {
      out.push_back(LayerKind::kSegmentLinkIn);
    } else if (name == "pool_step") {
      switch (cfg.approach) {
        case Approach::kNone:
          fail(ErrorKind::kValidation, "pool_step needs a supergraph approach");
        case Approach::kSuperEdges:
          out.push_back(LayerKind::kSuperEdge);
          break;
        case Approach::kPooling:
        case Approach::kCombined:
          out.insert(out.end(), {LayerKind::kPoolIn, LayerKind::kPoolOut});
          break;
        case Approach::kMirrors:
          out.insert(out.end(), {LayerKind::kPoolIn, LayerKind::kSegmentLinkOut,
                                 LayerKind::kSegmentLinkIn, LayerKind::kPoolOut});
          break;
      }
    } else {
      fail(ErrorKind::kValidation, "model config: unknown schedule entry '" + name + "'");
    }
  }
  return out;
}

GraphInputs GraphInputs::from(const supergraph::ExtendedGraph& graph) {
  GraphInputs in;
  const RoadGraph& base = graph.base();
  in.num_nodes = graph.num_nodes();
  in.num_base_nodes = base.num_nodes();
  in.approach = graph.approach();
  for (const RoadEdge& e : base.edges()) {
    in.base.src.push_back(e.src);
    in.base.dst.push_back(e.dst);
  }
  for (const auto& e : graph.extra_edges()) {
    EdgeList& list = in.by_role[static_cast<std::size_t>(e.role)];
    list.src.push_back(e.src);
    list.dst.push_back(e.dst);
  }
  in.has_segment_nodes = graph.has_segment_nodes();
  if (in.has_segment_nodes) {
    for (SegmentId s = 0; s < graph.segments().size(); ++s) {
      in.seg_head.push_back(graph.segments().segments[s].head());
      in.seg_tail.push_back(graph.segments().segments[s].tail());
      in.seg_node.push_back(*graph.segment_node(s));
    }
  }
  return in;
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)), layers_(expand_schedule(cfg_)) {}

MlpSpec Model::spec(std::size_t in, std::size_t out) const {
  return MlpSpec{in, out, cfg_.mlp_depth, cfg_.mlp_hidden};
}

std::string Model::layer_prefix(std::size_t i) const {
  const std::string kind = layer_name(layers_[i]);
  if (cfg_.share_params) return "gnn.shared." + kind;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu", i);
  return "gnn." + std::string(buf) + "." + kind;
}

void Model::init_parameters(ParameterStore& params, std::uint64_t seed) const {
  Rng rng(seed);
  const std::size_t h = cfg_.hidden_dim;
  init_mlp(params, "encoder.node", spec(features::kNodeFeatures, h), rng);
  init_mlp(params, "encoder.edge", spec(features::kEdgeFeatures, h), rng);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = layer_prefix(i);
    if (params.contains(prefix + ".message.l0.w")) continue;
    const std::size_t msg_in = layers_[i] == LayerKind::kConv ? 3 * h : 2 * h;
    init_mlp(params, prefix + ".message", spec(msg_in, h), rng);
    init_mlp(params, prefix + ".update", spec(2 * h, h), rng);
  }
  init_mlp(params, "predictor.edge", spec(5 * h, static_cast<std::size_t>(cfg_.num_classes)), rng);
  if (cfg_.task == Task::kExtended) init_mlp(params, "predictor.eta", spec(5 * h, 1), rng);
}

void Model::check_compatible(const GraphInputs& graph) const {
  auto has = [&](std::initializer_list<Approach> ok) {
    for (Approach a : ok) {
      if (graph.approach == a) return true;
    }
    return false;
  };
  for (LayerKind kind : layers_) {
    bool ok = true;
    switch (kind) {
      case LayerKind::kConv: break;
      case LayerKind::kSuperEdge: ok = has({Approach::kSuperEdges, Approach::kCombined}); break;
      case LayerKind::kPoolIn:
      case LayerKind::kPoolOut:
        ok = has({Approach::kPooling, Approach::kMirrors, Approach::kCombined});
        break;
      case LayerKind::kSegmentLinkIn:
      case LayerKind::kSegmentLinkOut: ok = has({Approach::kMirrors}); break;
    }
    if (!ok) {
      fail(ErrorKind::kValidation, "schedule layer '" + layer_name(kind) +
                                       "' is not supported by approach " +
                                       supergraph::approach_name(graph.approach));
    }
  }
  if (cfg_.task == Task::kExtended && !graph.has_segment_nodes) {
    fail(ErrorKind::kValidation, "extended task needs a supergraph with segment nodes");
  }
}

ForwardResult Model::forward(Tape& tape, const GraphInputs& graph, const Tensor& node_feats,
                             const Tensor& edge_feats) const {
  check_compatible(graph);
  if (node_feats.rows != graph.num_nodes || edge_feats.rows != graph.base.size()) {
    fail(ErrorKind::kState, "forward: feature rows do not match the graph");
  }
  const std::size_t h = cfg_.hidden_dim;
  ForwardResult out;
  out.h0 = mlp_forward(tape, "encoder.node", spec(features::kNodeFeatures, h),
                       tape.constant(node_feats));
  out.e0 = mlp_forward(tape, "encoder.edge", spec(features::kEdgeFeatures, h),
                       tape.constant(edge_feats));

  auto role = [&](EdgeRole r) -> const EdgeList& { return graph.by_role[static_cast<std::size_t>(r)]; };
  Var x = out.h0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = layer_prefix(i);
    const MlpSpec update = spec(2 * h, h);
    switch (layers_[i]) {
      case LayerKind::kConv:
        x = gnn_conv(tape, prefix, spec(3 * h, h), update, x, out.e0, graph.base);
        break;
      case LayerKind::kSuperEdge:
        x = gnn_pool_conv(tape, prefix, spec(2 * h, h), update, x, role(EdgeRole::kSuperEdge));
        break;
      case LayerKind::kPoolIn:
        x = gnn_pool_conv(tape, prefix, spec(2 * h, h), update, x, role(EdgeRole::kPoolIn));
        break;
      case LayerKind::kPoolOut:
        x = gnn_pool_conv(tape, prefix, spec(2 * h, h), update, x, role(EdgeRole::kPoolOut));
        break;
      case LayerKind::kSegmentLinkOut:
        x = gnn_pool_conv(tape, prefix, spec(2 * h, h), update, x, role(EdgeRole::kSegmentLinkOut));
        break;
      case LayerKind::kSegmentLinkIn:
        x = gnn_pool_conv(tape, prefix, spec(2 * h, h), update, x, role(EdgeRole::kSegmentLinkIn));
        break;
    }
  }
  out.hT = x;

  Var edge_in = tape.concat_cols({out.e0, tape.gather_rows(out.h0, graph.base.src),
                                  tape.gather_rows(out.h0, graph.base.dst),
                                  tape.gather_rows(out.hT, graph.base.src),
                                  tape.gather_rows(out.hT, graph.base.dst)});
  out.logits = mlp_forward(tape, "predictor.edge",
                           spec(5 * h, static_cast<std::size_t>(cfg_.num_classes)), edge_in);

  if (cfg_.task == Task::kExtended) {
    Var eta_in = tape.concat_cols({tape.gather_rows(out.h0, graph.seg_head),
                                   tape.gather_rows(out.h0, graph.seg_tail),
                                   tape.gather_rows(out.hT, graph.seg_head),
                                   tape.gather_rows(out.hT, graph.seg_tail),
                                   tape.gather_rows(out.hT, graph.seg_node)});
    out.etas = mlp_forward(tape, "predictor.eta", spec(5 * h, 1), eta_in);
  }
  return out;
}

}  // namespace t4c::nn
