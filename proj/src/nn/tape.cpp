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

#include "t4c/nn/tape.hpp"

#include <algorithm>
#include <cmath>

#include "t4c/error.hpp"

namespace t4c::nn {

namespace {

void check(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::kState, std::string("shape mismatch: ") + what);
}

// c += a * b with a (m,k), b (k,n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

}  // namespace

Var Tape::push(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tensor& Tape::grad_of(Var v) {
  Node& node = nodes_[v.id];
  if (node.grad.size() != node.value.size() || !node.grad.same_shape(node.value)) {
    node.grad = Tensor(node.value.rows, node.value.cols);
  }
  return node.grad;
}

Var Tape::constant(Tensor value) { return push(std::move(value), false); }

Var Tape::param(const std::string& name) {
  if (!values_) fail(ErrorKind::kState, "tape has no parameter store");
  if (auto it = param_vars_.find(name); it != param_vars_.end()) return it->second;
  Var v = push(values_->at(name).value, true);
  nodes_[v.id].param_name = name;
  param_vars_.emplace(name, v);
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  check(A.cols == B.rows, "matmul");
  Tensor out(A.rows, B.cols);
  gemm_nn(A.data.data(), B.data.data(), out.data.data(), A.rows, A.cols, B.cols);
  Var y = push(std::move(out), needs(a) || needs(b));
  nodes_[y.id].backward = [this, a, b, y] {
    const Tensor& G = nodes_[y.id].grad;
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    const std::size_t m = A.rows, k = A.cols, n = B.cols;
    if (needs(a)) {
      Tensor& dA = grad_of(a);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G.data[i * n + j] * B.data[p * n + j];
          dA.data[i * k + p] += s;
        }
      }
    }
    if (needs(b)) {
      Tensor& dB = grad_of(b);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A.data[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) dB.data[p * n + j] += aip * G.data[i * n + j];
        }
      }
    }
  };
  return y;
}

Var Tape::add_bias(Var x, Var bias) {
  const Tensor& X = value(x);
  const Tensor& B = value(bias);
  check(B.rows == 1 && B.cols == X.cols, "add_bias");
  Tensor out = X;
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) out.data[r * out.cols + c] += B.data[c];
  }
  Var y = push(std::move(out), needs(x) || needs(bias));
  nodes_[y.id].backward = [this, x, bias, y] {
    const Tensor& G = nodes_[y.id].grad;
    if (needs(x)) {
      Tensor& dX = grad_of(x);
      for (std::size_t i = 0; i < G.size(); ++i) dX.data[i] += G.data[i];
    }
    if (needs(bias)) {
      Tensor& dB = grad_of(bias);
      for (std::size_t r = 0; r < G.rows; ++r) {
        for (std::size_t c = 0; c < G.cols; ++c) dB.data[c] += G.data[r * G.cols + c];
      }
    }
  };
  return y;
}

Var Tape::add(Var a, Var b) { return weighted_sum(a, 1.0, b, 1.0); }

Var Tape::weighted_sum(Var a, double wa, Var b, double wb) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  check(A.same_shape(B), "weighted_sum");
  Tensor out(A.rows, A.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = wa * A.data[i] + wb * B.data[i];
  Var y = push(std::move(out), needs(a) || needs(b));
  nodes_[y.id].backward = [this, a, b, wa, wb, y] {
    const Tensor& G = nodes_[y.id].grad;
    if (needs(a)) {
      Tensor& d = grad_of(a);
      for (std::size_t i = 0; i < G.size(); ++i) d.data[i] += wa * G.data[i];
    }
    if (needs(b)) {
      Tensor& d = grad_of(b);
      for (std::size_t i = 0; i < G.size(); ++i) d.data[i] += wb * G.data[i];
    }
  };
  return y;
}

Var Tape::relu(Var x) {
  Tensor out = value(x);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  Var y = push(std::move(out), needs(x));
  relu_inputs_.push_back(x);
  nodes_[y.id].backward = [this, x, y] {
    if (!needs(x)) return;
    const Tensor& G = nodes_[y.id].grad;
    const Tensor& X = value(x);
    Tensor& dX = grad_of(x);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (X.data[i] > 0.0) dX.data[i] += G.data[i];
    }
  };
  return y;
}

std::vector<bool> Tape::relu_pattern() const {
  std::vector<bool> out;
  for (Var x : relu_inputs_) {
    for (double v : value(x).data) out.push_back(v > 0.0);
  }
  return out;
}

Var Tape::concat_cols(std::initializer_list<Var> parts_list) {
  std::vector<Var> parts(parts_list);
  check(!parts.empty(), "concat_cols needs inputs");
  const std::size_t rows = value(parts[0]).rows;
  std::size_t cols = 0;
  bool any = false;
  for (Var p : parts) {
    check(value(p).rows == rows, "concat_cols rows");
    cols += value(p).cols;
    any = any || needs(p);
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Tensor& P = value(p);
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(P.data.begin() + static_cast<std::ptrdiff_t>(r * P.cols), P.cols,
                  out.data.begin() + static_cast<std::ptrdiff_t>(r * cols + offset));
    }
    offset += P.cols;
  }
  Var y = push(std::move(out), any);
  nodes_[y.id].backward = [this, parts, y] {
    const Tensor& G = nodes_[y.id].grad;
    std::size_t offset = 0;
    for (Var p : parts) {
      const std::size_t pc = value(p).cols;
      if (needs(p)) {
        Tensor& d = grad_of(p);
        for (std::size_t r = 0; r < G.rows; ++r) {
          for (std::size_t c = 0; c < pc; ++c) d.data[r * pc + c] += G.data[r * G.cols + offset + c];
        }
      }
      offset += pc;
    }
  };
  return y;
}

Var Tape::gather_rows(Var x, Index index) {
  const Tensor& X = value(x);
  Tensor out(index.size(), X.cols);
  for (std::size_t i = 0; i < index.size(); ++i) {
    check(index[i] < X.rows, "gather_rows index");
    std::copy_n(X.data.begin() + static_cast<std::ptrdiff_t>(index[i] * X.cols), X.cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(i * X.cols));
  }
  Var y = push(std::move(out), needs(x));
  nodes_[y.id].backward = [this, x, y, index = std::move(index)] {
    if (!needs(x)) return;
    const Tensor& G = nodes_[y.id].grad;
    Tensor& dX = grad_of(x);
    const std::size_t c = G.cols;
    for (std::size_t i = 0; i < index.size(); ++i) {
      for (std::size_t j = 0; j < c; ++j) dX.data[index[i] * c + j] += G.data[i * c + j];
    }
  };
  return y;
}

Var Tape::scatter_sum_rows(Var x, Index index, std::size_t out_rows) {
  const Tensor& X = value(x);
  check(index.size() == X.rows, "scatter_sum_rows index length");
  // CSR of contributing rows per output row.
  std::vector<std::size_t> start(out_rows + 1, 0);
  for (auto r : index) {
    check(r < out_rows, "scatter_sum_rows index");
    ++start[r + 1];
  }
  for (std::size_t r = 0; r < out_rows; ++r) start[r + 1] += start[r];
  std::vector<std::size_t> rows(index.size());
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < index.size(); ++i) rows[fill[index[i]]++] = i;

  Tensor out(out_rows, X.cols);
  std::vector<double> buf;
  for (std::size_t r = 0; r < out_rows; ++r) {
    const std::size_t b = start[r], e = start[r + 1];
    if (b == e) continue;
    for (std::size_t c = 0; c < X.cols; ++c) {
      buf.clear();
      for (std::size_t k = b; k < e; ++k) buf.push_back(X.data[rows[k] * X.cols + c]);
      std::sort(buf.begin(), buf.end());
      double s = 0.0;
      for (double v : buf) s += v;
      out.data[r * X.cols + c] = s;
    }
  }
  Var y = push(std::move(out), needs(x));
  nodes_[y.id].backward = [this, x, y, index = std::move(index)] {
    if (!needs(x)) return;
    const Tensor& G = nodes_[y.id].grad;
    Tensor& dX = grad_of(x);
    const std::size_t c = G.cols;
    for (std::size_t i = 0; i < index.size(); ++i) {
      for (std::size_t j = 0; j < c; ++j) dX.data[i * c + j] += G.data[index[i] * c + j];
    }
  };
  return y;
}

Var Tape::weighted_cross_entropy(Var logits, std::vector<int> labels, std::vector<double> weights) {
  const Tensor& L = value(logits);
  check(labels.size() == L.rows, "weighted_cross_entropy labels");
  check(weights.size() == L.cols, "weighted_cross_entropy weights");
  const std::size_t c = L.cols;
  std::size_t labeled = 0;
  for (int y : labels) {
    if (y >= 0) {
      check(static_cast<std::size_t>(y) < c, "weighted_cross_entropy label range");
      ++labeled;
    }
  }
  // Row softmax is kept for the backward pass.
  Tensor probs(L.rows, c);
  double total = 0.0;
  for (std::size_t r = 0; r < L.rows; ++r) {
    if (labels[r] < 0) continue;
    const double* row = L.data.data() + r * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    for (std::size_t j = 0; j < c; ++j) probs.data[r * c + j] = std::exp(row[j] - mx) / z;
    const double log_p = row[labels[r]] - mx - std::log(z);
    total += weights[static_cast<std::size_t>(labels[r])] * -log_p;
  }
  const double loss = labeled ? total / static_cast<double>(labeled) : 0.0;
  Var y = push(Tensor(1, 1, loss), needs(logits));
  nodes_[y.id].backward = [this, logits, y, labeled, labels = std::move(labels),
                           weights = std::move(weights), probs = std::move(probs)] {
    if (!needs(logits) || labeled == 0) return;
    const double g = nodes_[y.id].grad.data[0] / static_cast<double>(labeled);
    Tensor& d = grad_of(logits);
    const std::size_t c = d.cols;
    for (std::size_t r = 0; r < d.rows; ++r) {
      if (labels[r] < 0) continue;
      const double w = weights[static_cast<std::size_t>(labels[r])] * g;
      for (std::size_t j = 0; j < c; ++j) {
        const double onehot = static_cast<int>(j) == labels[r] ? 1.0 : 0.0;
        d.data[r * c + j] += w * (probs.data[r * c + j] - onehot);
      }
    }
  };
  return y;
}

Var Tape::masked_l1(Var pred, std::vector<std::optional<double>> targets) {
  const Tensor& P = value(pred);
  check(P.cols == 1 && P.rows == targets.size(), "masked_l1");
  std::size_t present = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!targets[i]) continue;
    ++present;
    total += std::abs(P.data[i] - *targets[i]);
  }
  const double loss = present ? total / static_cast<double>(present) : 0.0;
  Var y = push(Tensor(1, 1, loss), needs(pred));
  nodes_[y.id].backward = [this, pred, y, present, targets = std::move(targets)] {
    if (!needs(pred) || present == 0) return;
    const double g = nodes_[y.id].grad.data[0] / static_cast<double>(present);
    const Tensor& P = value(pred);
    Tensor& d = grad_of(pred);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!targets[i]) continue;
      const double diff = P.data[i] - *targets[i];
      d.data[i] += diff > 0.0 ? g : (diff < 0.0 ? -g : 0.0);
    }
  };
  return y;
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) fail(ErrorKind::kState, "backward called before any forward pass");
  if (done_) fail(ErrorKind::kState, "backward already ran on this tape");
  if (loss.id >= nodes_.size() || value(loss).size() != 1) {
    fail(ErrorKind::kState, "backward needs a scalar loss");
  }
  done_ = true;
  grad_of(loss).data[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || node.grad.size() == 0) continue;
    if (node.backward) node.backward();
  }
  if (!grads_) return;
  for (const auto& [name, var] : param_vars_) {
    const Node& node = nodes_[var.id];
    if (node.grad.size() == 0) continue;
    Tensor& dst = grads_->at(name).grad;
    for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += node.grad.data[i];
  }
}

}  // namespace t4c::nn
