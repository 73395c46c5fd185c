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

#include <optional>
#include <string>
#include <vector>

#include "t4c/io.hpp"
#include "t4c/nn/params.hpp"
#include "t4c/nn/tape.hpp"
#include "t4c/supergraph.hpp"

namespace t4c::nn {

// Affine layers in -> hidden -> ... -> out with ReLU between them; `depth`
// counts affine layers, so depth 1 is a single affine map.
struct MlpSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t depth = 2;
  std::size_t hidden = 32;
};

// Parameters "<prefix>.l<i>.w" (in, out) and "<prefix>.l<i>.b" (1, out),
// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void init_mlp(ParameterStore& params, const std::string& prefix, const MlpSpec& spec, Rng& rng);
Var mlp_forward(Tape& tape, const std::string& prefix, const MlpSpec& spec, Var x);

struct EdgeList {
  Index src;
  Index dst;

  std::size_t size() const { return src.size(); }
};

// Message passing with edge embeddings:
//   m_e = MessageNN([h_src ; h_dst ; e0_e]),  a_v = sum of m_e over dst(e) = v,
//   h'_v = h_v + UpdateNN([h_v ; a_v]).
Var gnn_conv(Tape& tape, const std::string& prefix, const MlpSpec& message,
             const MlpSpec& update, Var h, Var e0, const EdgeList& edges);

// As gnn_conv without edge embeddings: m_e = MessageNN([h_src ; h_dst]).
Var gnn_pool_conv(Tape& tape, const std::string& prefix, const MlpSpec& message,
                  const MlpSpec& update, Var h, const EdgeList& edges);

enum class LayerKind {
  kConv,            // GNNConv over base road edges
  kSuperEdge,       // GNNPoolConv over super edges
  kPoolIn,          // GNNPoolConv path nodes -> segment nodes
  kPoolOut,         // GNNPoolConv segment nodes -> path nodes
  kSegmentLinkOut,  // GNNPoolConv segment nodes -> mirrors
  kSegmentLinkIn,   // GNNPoolConv mirrors -> segment nodes
};

std::string layer_name(LayerKind kind);

enum class Task { kCore, kExtended };

struct ModelConfig {
  std::size_t hidden_dim = 32;
  std::size_t mlp_depth = 2;
  std::size_t mlp_hidden = 32;
  int num_classes = 3;
  Task task = Task::kCore;
  bool share_params = false;
  // Entries: "conv_on_base", "super_edge_step", "pool_step" (expanded per
  // approach), or a single layer name ("pool_in", "pool_out",
  // "segment_link_out", "segment_link_in"). Empty selects the approach's
  // default schedule.
  std::vector<std::string> schedule;
  supergraph::Approach approach = supergraph::Approach::kNone;
};

Json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const Json& json);

// Default schedules:
//   none: 6 x conv
//   1:    4 x conv, super, 2 x conv
//   2:    4 x conv, pool_in, pool_out, 2 x conv
//   3:    4 x conv, pool_in, link_out, link_in, pool_out, 2 x conv
//   1+2:  2 x conv, super, 2 x conv, super, pool_in, pool_out, 2 x conv
std::vector<std::string> default_schedule(supergraph::Approach approach);
std::vector<LayerKind> expand_schedule(const ModelConfig& cfg);

// Index arrays extracted once from an extended graph.
struct GraphInputs {
  std::size_t num_nodes = 0;  // base + extra
  std::size_t num_base_nodes = 0;
  EdgeList base;
  EdgeList by_role[supergraph::kNumEdgeRoles];
  Index seg_head, seg_tail, seg_node;
  bool has_segment_nodes = false;
  supergraph::Approach approach = supergraph::Approach::kNone;

  static GraphInputs from(const supergraph::ExtendedGraph& graph);
};

struct ForwardResult {
  Var h0;
  Var hT;
  Var e0;
  Var logits;                // (E_base, C)
  std::optional<Var> etas;   // (S, 1), extended task only
};

class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  const std::vector<LayerKind>& layers() const { return layers_; }
  // Parameter name prefix of layer i, e.g. "gnn.04.pool_in".
  std::string layer_prefix(std::size_t i) const;

  void init_parameters(ParameterStore& params, std::uint64_t seed) const;

  // node_feats (N', 14) including extra nodes; edge_feats (E_base, 4).
  ForwardResult forward(Tape& tape, const GraphInputs& graph, const Tensor& node_feats,
                        const Tensor& edge_feats) const;

  // Throws kValidation when the graph lacks edges or nodes the schedule or
  // task needs.
  void check_compatible(const GraphInputs& graph) const;

 private:
  MlpSpec spec(std::size_t in, std::size_t out) const;

  ModelConfig cfg_;
  std::vector<LayerKind> layers_;
};

}  // namespace t4c::nn
