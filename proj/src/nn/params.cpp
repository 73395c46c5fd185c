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

#include "t4c/nn/params.hpp"

#include "t4c/error.hpp"

namespace t4c::nn {

ParameterStore::Entry& ParameterStore::add(const std::string& name, std::size_t rows,
                                           std::size_t cols, Rng& rng, double bound) {
  Tensor value(rows, cols);
  for (double& v : value.data) v = rng.uniform(-bound, bound);
  return add(name, std::move(value));
}

ParameterStore::Entry& ParameterStore::add(const std::string& name, Tensor value) {
  if (entries_.contains(name)) fail(ErrorKind::kState, "duplicate parameter '" + name + "'");
  Tensor grad(value.rows, value.cols);
  return entries_.emplace(name, Entry{std::move(value), std::move(grad)}).first->second;
}

ParameterStore::Entry& ParameterStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) fail(ErrorKind::kState, "unknown parameter '" + name + "'");
  return it->second;
}

const ParameterStore::Entry& ParameterStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) fail(ErrorKind::kState, "unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& [name, e] : entries_) std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
}

bool ParameterStore::same_values(const ParameterStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || !(a->second.value == b->second.value)) return false;
  }
  return true;
}

}  // namespace t4c::nn
