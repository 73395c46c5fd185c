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

#include "t4c/manifest.hpp"

#include <ctime>

#include "t4c/hash.hpp"

namespace t4c {

std::string digest_file(const std::filesystem::path& path) {
  return hex64(fnv1a64(read_file(path)));
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& command, const std::string& config_hash,
                          const std::vector<std::filesystem::path>& inputs, std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash;
  for (const auto& p : inputs) m.inputs.emplace_back(p.string(), digest_file(p));
  m.seed = seed;
  m.timestamp_utc = utc_timestamp();
  return m;
}

Json manifest_to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& [path, digest] : m.inputs) inputs.push_back({{"path", path}, {"fnv1a64", digest}});
  return Json{{"tool_version", m.tool_version},
              {"command", m.command},
              {"config_hash", m.config_hash.empty() ? Json(nullptr) : Json(m.config_hash)},
              {"inputs", inputs},
              {"seed", m.seed},
              {"timestamp_utc", m.timestamp_utc}};
}

void write_manifest(const std::filesystem::path& output, const RunManifest& manifest) {
  std::filesystem::path p = output;
  p += ".manifest.json";
  write_file(p, manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace t4c
