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
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "t4c/nn/params.hpp"
#include "t4c/nn/tensor.hpp"

namespace t4c::nn {

struct Var {
  std::uint32_t id = 0;
};

using Index = std::vector<std::uint32_t>;

// Reverse-mode tape over 2-D tensors. Each op records its output value and a
// closure that pushes the output gradient to its inputs. One tape serves one
// forward/backward pass.
class Tape {
 public:
  Tape() = default;
  // Gradients are added into `params` by backward().
  explicit Tape(ParameterStore* params) : values_(params), grads_(params) {}
  // Read-only binding for inference; backward() keeps gradients on the tape.
  explicit Tape(const ParameterStore* params) : values_(params) {}

  Var constant(Tensor value);
  // Leaf bound to a store entry; repeated calls return the same Var.
  Var param(const std::string& name);

  Var matmul(Var a, Var b);
  // x (n, c) plus bias (1, c) on every row.
  Var add_bias(Var x, Var bias);
  Var add(Var a, Var b);
  Var relu(Var x);
  Var concat_cols(std::initializer_list<Var> parts);
  // out[i] = x[index[i]]
  Var gather_rows(Var x, Index index);
  // out[r] = sum of x[i] over index[i] == r. Each output entry sums its
  // contributions in ascending value order, so the result does not depend on
  // the order of rows in x.
  Var scatter_sum_rows(Var x, Index index, std::size_t out_rows);

  // Mean over labeled rows of w[y] * -log softmax(logits)[y]; labels < 0
  // are unlabeled. 0 when nothing is labeled. Returns (1, 1).
  Var weighted_cross_entropy(Var logits, std::vector<int> labels, std::vector<double> weights);
  // Mean |pred - target| over present targets; 0 when none. pred is (n, 1).
  Var masked_l1(Var pred, std::vector<std::optional<double>> targets);
  // wa * a + wb * b for same-shaped a and b.
  Var weighted_sum(Var a, double wa, Var b, double wb);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t size() const { return nodes_.size(); }
  // Active (input > 0) flag of every ReLU entry in recording order.
  std::vector<bool> relu_pattern() const;

  // Seeds d(loss)/d(loss) = 1 and runs the recorded closures in reverse.
  // Parameter gradients are added into a mutably bound store. Throws
  // Error(kState) on an empty tape, a non-scalar loss, or a second call.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void()> backward;
    std::string param_name;
  };

  Var push(Tensor value, bool requires_grad);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  Tensor& grad_of(Var v);

  const ParameterStore* values_ = nullptr;
  ParameterStore* grads_ = nullptr;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Var> param_vars_;
  std::vector<Var> relu_inputs_;
  bool done_ = false;
};

}  // namespace t4c::nn
