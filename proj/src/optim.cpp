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

#include <cmath>

#include "t4c/error.hpp"
#include "t4c/nn/tape.hpp"
#include "t4c/training.hpp"

namespace t4c::training {

double weighted_cross_entropy(const Tensor& logits, std::span<const std::optional<int>> labels,
                              std::span<const double> class_weights) {
  nn::Tape tape;
  std::vector<int> y;
  y.reserve(labels.size());
  for (const auto& l : labels) y.push_back(l ? *l : -1);
  nn::Var loss = tape.weighted_cross_entropy(
      tape.constant(logits), std::move(y),
      std::vector<double>(class_weights.begin(), class_weights.end()));
  return tape.value(loss).data[0];
}

double eta_l1(std::span<const double> pred, std::span<const std::optional<double>> targets) {
  nn::Tape tape;
  nn::Var loss = tape.masked_l1(
      tape.constant(Tensor(pred.size(), 1, std::vector<double>(pred.begin(), pred.end()))),
      std::vector<std::optional<double>>(targets.begin(), targets.end()));
  return tape.value(loss).data[0];
}

void adamw_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, const AdamWConfig& cfg, std::int64_t t) {
  if (theta.size() != grad.size() || theta.size() != m.size() || theta.size() != v.size()) {
    fail(ErrorKind::kState, "adamw: parameter, gradient and moment shapes differ");
  }
  if (t < 1) fail(ErrorKind::kState, "adamw: step must be >= 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    theta[i] = theta[i] - cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps)) -
               cfg.lr * cfg.weight_decay * theta[i];
  }
}

void adamw_step(ParameterStore& params, AdamState& state, const AdamWConfig& cfg) {
  ++state.step;
  for (auto& [name, entry] : params.entries()) {
    auto [mit, m_new] = state.m.try_emplace(name, entry.value.rows, entry.value.cols);
    auto [vit, v_new] = state.v.try_emplace(name, entry.value.rows, entry.value.cols);
    if (!mit->second.same_shape(entry.value) || !vit->second.same_shape(entry.value)) {
      fail(ErrorKind::kState, "adamw: moment shape mismatch for '" + name + "'");
    }
    adamw_update(entry.value.data, entry.grad.data, mit->second.data, vit->second.data, cfg,
                 state.step);
  }
}

}  // namespace t4c::training
