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

#include <map>
#include <string>

#include "t4c/nn/tensor.hpp"
#include "t4c/rng.hpp"

namespace t4c::nn {

// Named parameters with paired gradient buffers, iterated in name order.
class ParameterStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
  };

  // Uniform(-bound, bound) initialization. Names must be unique.
  Entry& add(const std::string& name, std::size_t rows, std::size_t cols, Rng& rng, double bound);
  Entry& add(const std::string& name, Tensor value);

  bool contains(const std::string& name) const { return entries_.contains(name); }
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::size_t size() const { return entries_.size(); }
  std::size_t num_scalars() const;
  void zero_grad();

  // Same names, shapes and values.
  bool same_values(const ParameterStore& other) const;

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace t4c::nn
