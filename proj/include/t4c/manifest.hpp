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
#include <filesystem>
#include <string>
#include <vector>

#include "t4c/io.hpp"

namespace t4c {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string tool_version = kVersion;
  std::string command;
  std::string config_hash;  // empty when the command takes no config
  std::vector<std::pair<std::string, std::string>> inputs;  // path, FNV-1a digest
  std::uint64_t seed = 0;
  std::string timestamp_utc;
};

std::string digest_file(const std::filesystem::path& path);
std::string utc_timestamp();

RunManifest make_manifest(const std::string& command, const std::string& config_hash,
                          const std::vector<std::filesystem::path>& inputs, std::uint64_t seed);
Json manifest_to_json(const RunManifest& manifest);
// Writes `<output>.manifest.json`.
void write_manifest(const std::filesystem::path& output, const RunManifest& manifest);

}  // namespace t4c
