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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "t4c/features.hpp"
#include "t4c/graph.hpp"
#include "t4c/nn/model.hpp"
#include "t4c/nn/params.hpp"
#include "t4c/nn/tape.hpp"
#include "t4c/rng.hpp"

namespace t4c::oracles {

using nn::ParameterStore;
using nn::Tape;
using nn::Tensor;
using nn::Var;

struct GradCheck {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::size_t kinks = 0;  // entries whose +-eps step flips a ReLU
  double worst = 0.0;
  std::string worst_name;
};

// Compares backward() against central differences for every scalar of every
// parameter. `loss` records a scalar on the tape it is given.
inline GradCheck gradient_check(ParameterStore& params,
                                const std::function<Var(Tape&)>& loss, double eps = 1e-5,
                                double tol = 1e-4) {
  params.zero_grad();
  {
    Tape tape(&params);
    tape.backward(loss(tape));
  }
  std::vector<bool> pattern;
  auto eval = [&] {
    Tape tape(static_cast<const ParameterStore*>(&params));
    const double v = tape.value(loss(tape)).data[0];
    pattern = tape.relu_pattern();
    return v;
  };
  eval();
  const std::vector<bool> base = pattern;
  GradCheck out;
  for (auto& [name, entry] : params.entries()) {
    for (std::size_t i = 0; i < entry.value.data.size(); ++i) {
      const double keep = entry.value.data[i];
      entry.value.data[i] = keep + eps;
      const double up = eval();
      bool kink = pattern != base;
      entry.value.data[i] = keep - eps;
      const double down = eval();
      kink = kink || pattern != base;
      if (kink) ++out.kinks;
      entry.value.data[i] = keep;
      const double fd = (up - down) / (2.0 * eps);
      const double analytic = entry.grad.data[i];
      const double rel = std::abs(analytic - fd) / (std::abs(analytic) + 1e-8);
      ++out.checked;
      if (!(rel < tol)) ++out.failed;
      if (rel > out.worst) {
        out.worst = rel;
        out.worst_name = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

inline Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t(r, c);
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Row-vector times matrix, by loops.
inline std::vector<double> affine(const std::vector<double>& x, const Tensor& w, const Tensor& b) {
  std::vector<double> y(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    double s = b.at(0, j);
    for (std::size_t i = 0; i < w.rows; ++i) s += x[i] * w.at(i, j);
    y[j] = s;
  }
  return y;
}

inline std::vector<double> naive_mlp(const ParameterStore& p, const std::string& prefix,
                                     std::size_t depth, std::vector<double> x) {
  for (std::size_t l = 0; l < depth; ++l) {
    const std::string name = prefix + ".l" + std::to_string(l);
    x = affine(x, p.at(name + ".w").value, p.at(name + ".b").value);
    if (l + 1 < depth) {
      for (double& v : x) v = std::max(v, 0.0);
    }
  }
  return x;
}

inline std::vector<double> cat(std::initializer_list<std::vector<double>> parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::vector<double> row_of(const Tensor& t, std::size_t r) {
  return {t.data.begin() + static_cast<std::ptrdiff_t>(r * t.cols),
          t.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * t.cols)};
}

// Per-edge loop form of gnn_conv (e0 empty selects the pool variant).
inline Tensor naive_conv(const ParameterStore& p, const std::string& prefix, std::size_t depth,
                         const Tensor& h, const Tensor* e0, const nn::EdgeList& edges) {
  std::vector<std::vector<double>> agg(h.rows, std::vector<double>(h.cols, 0.0));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto in = e0 ? cat({row_of(h, edges.src[e]), row_of(h, edges.dst[e]), row_of(*e0, e)})
                 : cat({row_of(h, edges.src[e]), row_of(h, edges.dst[e])});
    const auto m = naive_mlp(p, prefix + ".message", depth, in);
    for (std::size_t j = 0; j < h.cols; ++j) agg[edges.dst[e]][j] += m[j];
  }
  Tensor out(h.rows, h.cols);
  for (std::size_t v = 0; v < h.rows; ++v) {
    const auto u = naive_mlp(p, prefix + ".update", depth, cat({row_of(h, v), agg[v]}));
    for (std::size_t j = 0; j < h.cols; ++j) out.at(v, j) = h.at(v, j) + u[j];
  }
  return out;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

// Loop form of Model::forward in long double. Parameters are copied once so a
// finite-difference step can be applied in extended precision.
class ReferenceModel {
 public:
  using Real = long double;
  using Row = std::vector<Real>;
  using Rows = std::vector<Row>;

  ReferenceModel(const nn::Model& model, const ParameterStore& params, const nn::GraphInputs& in,
                 const Tensor& node_feats, const Tensor& edge_feats)
      : model_(model), in_(in), nf_(to_rows(node_feats)), ef_(to_rows(edge_feats)) {
    for (const auto& [name, e] : params.entries()) {
      Param q{e.value.rows, e.value.cols, Row(e.value.data.begin(), e.value.data.end())};
      params_.emplace(name, std::move(q));
    }
  }

  Real& at(const std::string& name, std::size_t i) { return params_.at(name).data[i]; }

  struct Output {
    Rows logits;
    Rows etas;
  };

  // `pattern` receives the active flag of every hidden unit, in a fixed order.
  Output forward(std::vector<bool>* pattern = nullptr) const {
    pattern_ = pattern;
    if (pattern_) pattern_->clear();
    const auto& cfg = model_.config();
    const std::size_t depth = cfg.mlp_depth;
    Rows h0 = map_rows("encoder.node", depth, nf_);
    Rows e0 = map_rows("encoder.edge", depth, ef_);
    Rows x = h0;
    for (std::size_t i = 0; i < model_.layers().size(); ++i) {
      const std::string prefix = model_.layer_prefix(i);
      switch (model_.layers()[i]) {
        case nn::LayerKind::kConv: x = conv(prefix, depth, x, &e0, in_.base); break;
        case nn::LayerKind::kSuperEdge: x = conv(prefix, depth, x, nullptr, role(supergraph::EdgeRole::kSuperEdge)); break;
        case nn::LayerKind::kPoolIn: x = conv(prefix, depth, x, nullptr, role(supergraph::EdgeRole::kPoolIn)); break;
        case nn::LayerKind::kPoolOut: x = conv(prefix, depth, x, nullptr, role(supergraph::EdgeRole::kPoolOut)); break;
        case nn::LayerKind::kSegmentLinkOut: x = conv(prefix, depth, x, nullptr, role(supergraph::EdgeRole::kSegmentLinkOut)); break;
        case nn::LayerKind::kSegmentLinkIn: x = conv(prefix, depth, x, nullptr, role(supergraph::EdgeRole::kSegmentLinkIn)); break;
      }
    }
    Output out;
    for (std::size_t e = 0; e < in_.base.size(); ++e) {
      const auto s = in_.base.src[e], d = in_.base.dst[e];
      out.logits.push_back(mlp("predictor.edge", depth, join({e0[e], h0[s], h0[d], x[s], x[d]})));
    }
    if (cfg.task == nn::Task::kExtended) {
      for (std::size_t k = 0; k < in_.seg_node.size(); ++k) {
        const auto a = in_.seg_head[k], b = in_.seg_tail[k], c = in_.seg_node[k];
        out.etas.push_back(mlp("predictor.eta", depth, join({h0[a], h0[b], x[a], x[b], x[c]})));
      }
    }
    pattern_ = nullptr;
    return out;
  }

 private:
  struct Param {
    std::size_t rows, cols;
    Row data;
  };

  static Rows to_rows(const Tensor& t) {
    Rows out(t.rows);
    for (std::size_t r = 0; r < t.rows; ++r) out[r].assign(t.row(r).begin(), t.row(r).end());
    return out;
  }

  static Row join(std::initializer_list<Row> parts) {
    Row out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  const nn::EdgeList& role(supergraph::EdgeRole r) const { return in_.by_role[static_cast<std::size_t>(r)]; }

  Row mlp(const std::string& prefix, std::size_t depth, Row x) const {
    for (std::size_t l = 0; l < depth; ++l) {
      const std::string name = prefix + ".l" + std::to_string(l);
      const Param& w = params_.at(name + ".w");
      const Param& b = params_.at(name + ".b");
      Row y(w.cols);
      for (std::size_t j = 0; j < w.cols; ++j) {
        Real acc = b.data[j];
        for (std::size_t i = 0; i < w.rows; ++i) acc += x[i] * w.data[i * w.cols + j];
        y[j] = acc;
      }
      if (l + 1 < depth) {
        for (Real& v : y) {
          if (pattern_) pattern_->push_back(v > 0);
          v = v > 0 ? v : 0;
        }
      }
      x = std::move(y);
    }
    return x;
  }

  Rows map_rows(const std::string& prefix, std::size_t depth, const Rows& rows) const {
    Rows out;
    for (const auto& r : rows) out.push_back(mlp(prefix, depth, r));
    return out;
  }

  Rows conv(const std::string& prefix, std::size_t depth, const Rows& h, const Rows* e0,
            const nn::EdgeList& edges) const {
    const std::size_t width = h.empty() ? 0 : h[0].size();
    Rows agg(h.size(), Row(width, 0));
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto s = edges.src[e], d = edges.dst[e];
      const Row m = e0 ? mlp(prefix + ".message", depth, join({h[s], h[d], (*e0)[e]}))
                       : mlp(prefix + ".message", depth, join({h[s], h[d]}));
      for (std::size_t j = 0; j < width; ++j) agg[d][j] += m[j];
    }
    Rows out(h.size());
    for (std::size_t v = 0; v < h.size(); ++v) {
      const Row u = mlp(prefix + ".update", depth, join({h[v], agg[v]}));
      out[v] = h[v];
      for (std::size_t j = 0; j < width; ++j) out[v][j] += u[j];
    }
    return out;
  }

  const nn::Model& model_;
  const nn::GraphInputs& in_;
  Rows nf_, ef_;
  std::map<std::string, Param> params_;
  mutable std::vector<bool>* pattern_ = nullptr;
};

// gradient_check with the finite differences taken on `ref` in long double.
// `probe` maps the reference outputs to the scalar whose gradient `params`
// holds.
inline GradCheck reference_gradient_check(
    const ParameterStore& params, ReferenceModel& ref,
    const std::function<long double(const ReferenceModel::Output&)>& probe, double eps = 1e-5,
    double tol = 1e-4) {
  std::vector<bool> base, pattern;
  ref.forward(&base);
  GradCheck out;
  for (const auto& [name, entry] : params.entries()) {
    for (std::size_t i = 0; i < entry.value.data.size(); ++i) {
      long double& v = ref.at(name, i);
      const long double keep = v;
      v = keep + eps;
      const long double up = probe(ref.forward(&pattern));
      bool kink = pattern != base;
      v = keep - eps;
      const long double down = probe(ref.forward(&pattern));
      kink = kink || pattern != base;
      v = keep;
      if (kink) ++out.kinks;
      const double fd = static_cast<double>((up - down) / (2.0L * eps));
      const double analytic = entry.grad.data[i];
      const double rel = std::abs(analytic - fd) / (std::abs(analytic) + 1e-8);
      ++out.checked;
      if (!(rel < tol)) ++out.failed;
      if (rel > out.worst) {
        out.worst = rel;
        out.worst_name = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

struct Permuted {
  Dataset data;
  std::vector<NodeId> node_perm;  // old -> new
  std::vector<EdgeId> edge_perm;  // old -> new
};

// Relabels nodes by a random permutation and shuffles the edge list.
inline Permuted permute(const Dataset& d, Rng& rng) {
  Permuted out;
  const std::size_t n = d.graph.num_nodes(), m = d.graph.num_edges();
  out.node_perm.resize(n);
  std::iota(out.node_perm.begin(), out.node_perm.end(), 0);
  rng.shuffle(out.node_perm);
  std::vector<EdgeId> order(m);  // new -> old
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  out.edge_perm.resize(m);
  for (EdgeId k = 0; k < m; ++k) out.edge_perm[order[k]] = k;

  std::vector<RoadNode> nodes(n);
  for (NodeId v = 0; v < n; ++v) nodes[out.node_perm[v]] = d.graph.node(v);
  std::vector<RoadEdge> edges(m);
  for (EdgeId e = 0; e < m; ++e) {
    RoadEdge re = d.graph.edge(e);
    re.src = out.node_perm[re.src];
    re.dst = out.node_perm[re.dst];
    edges[out.edge_perm[e]] = re;
  }
  out.data.graph = RoadGraph(std::move(nodes), std::move(edges));
  for (const auto& s : d.segments.segments) {
    Supersegment t;
    for (NodeId v : s.path) t.path.push_back(out.node_perm[v]);
    out.data.segments.segments.push_back(std::move(t));
  }
  for (const Sample& s : d.samples) {
    Sample t = s;
    for (NodeId v = 0; v < n; ++v) t.counts[out.node_perm[v]] = s.counts[v];
    for (EdgeId e = 0; e < m; ++e) t.edge_labels[out.edge_perm[e]] = s.edge_labels[e];
    out.data.samples.push_back(std::move(t));
  }
  return out;
}

}  // namespace t4c::oracles
