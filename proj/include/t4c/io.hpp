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

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "t4c/graph.hpp"

namespace t4c {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Parses JSON text; failures become Error(kParse) with line:column context.
Json parse_json(std::string_view text, std::string_view source_name);

Json dataset_to_json(const Dataset& dataset);
// Schema errors throw kParse; the result is not validated.
Dataset dataset_from_json(const Json& json);

// Deterministic serialization: sorted keys, shortest round-trip doubles.
std::string serialize_dataset(const Dataset& dataset);

// Validates and throws kValidation on the first violation.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace t4c
