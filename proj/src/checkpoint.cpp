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

#include <bit>
#include <cstring>

#include "t4c/error.hpp"
#include "t4c/training.hpp"

namespace t4c::training {

namespace {

constexpr char kMagic[8] = {'T', '4', 'C', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

void put_tensor(std::string& out, const Tensor& t) {
  for (double d : t.data) put_u64(out, std::bit_cast<std::uint64_t>(d));
}

class Reader {
 public:
  Reader(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  void read(Tensor& t) {
    if (bytes_.size() - pos_ < 8 * t.size()) fail(ErrorKind::kParse, "checkpoint: truncated blob");
    for (double& d : t.data) {
      d = std::bit_cast<double>(get_u64(bytes_, pos_));
      pos_ += 8;
    }
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  Json params = Json::array();
  for (const auto& [name, e] : ckpt.params.entries()) {
    params.push_back({{"name", name}, {"rows", e.value.rows}, {"cols", e.value.cols}});
  }
  const bool has_moments = !ckpt.adam.m.empty();
  Json header{{"format", "t4c-checkpoint"},
              {"version", 1},
              {"config", ckpt.config},
              {"config_hash", ckpt.config_hash},
              {"seed", ckpt.seed},
              {"epoch", ckpt.epoch},
              {"step", ckpt.adam.step},
              {"rng_state", ckpt.rng_state},
              {"normalization",
               {{"count_scale", ckpt.norm.count_scale},
                {"eta_scale", ckpt.norm.eta_scale},
                {"class_weights", ckpt.norm.class_weights}}},
              {"params", std::move(params)},
              {"has_moments", has_moments}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, text.size());
  out += text;
  for (const auto& [name, e] : ckpt.params.entries()) put_tensor(out, e.value);
  if (has_moments) {
    for (const auto& [name, e] : ckpt.params.entries()) put_tensor(out, ckpt.adam.m.at(name));
    for (const auto& [name, e] : ckpt.params.entries()) put_tensor(out, ckpt.adam.v.at(name));
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorKind::kParse, "checkpoint: bad magic");
  }
  const std::uint64_t len = get_u64(bytes, 8);
  if (bytes.size() - 16 < len) fail(ErrorKind::kParse, "checkpoint: truncated header");
  const Json header = parse_json(bytes.substr(16, len), "checkpoint header");
  Checkpoint ckpt;
  try {
    if (header.at("format") != "t4c-checkpoint" || header.at("version") != 1) {
      fail(ErrorKind::kParse, "checkpoint: unsupported format");
    }
    ckpt.config = header.at("config");
    ckpt.config_hash = header.at("config_hash").get<std::string>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.adam.step = header.at("step").get<std::int64_t>();
    ckpt.rng_state = header.at("rng_state").get<std::string>();
    const Json& norm = header.at("normalization");
    ckpt.norm.count_scale = norm.at("count_scale").get<double>();
    ckpt.norm.eta_scale = norm.at("eta_scale").get<double>();
    ckpt.norm.class_weights = norm.at("class_weights").get<std::vector<double>>();
    Reader reader(bytes, 16 + len);
    std::vector<std::string> names;
    for (const Json& p : header.at("params")) {
      Tensor t(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>());
      reader.read(t);
      names.push_back(p.at("name").get<std::string>());
      ckpt.params.add(names.back(), std::move(t));
    }
    if (header.at("has_moments").get<bool>()) {
      for (auto* moments : {&ckpt.adam.m, &ckpt.adam.v}) {
        for (const std::string& name : names) {
          const Tensor& value = ckpt.params.at(name).value;
          Tensor t(value.rows, value.cols);
          reader.read(t);
          moments->emplace(name, std::move(t));
        }
      }
    }
    if (!reader.at_end()) fail(ErrorKind::kParse, "checkpoint: trailing bytes");
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("checkpoint header: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace t4c::training
