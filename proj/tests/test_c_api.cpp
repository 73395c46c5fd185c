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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "t4c/t4c.h"

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("t4c_capi_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSpec = R"({"grid_w": 3, "grid_h": 3, "n_supernodes": 4, "k_nearest": 2,
                        "num_samples": 4, "seed": 5})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(CApi, VersionAndLastError) {
  EXPECT_STREQ(t4c_version(), "0.1.0");
  t4c_dataset* d = nullptr;
  EXPECT_EQ(t4c_dataset_load("/nonexistent/city.json", &d), T4C_ERR_IO);
  EXPECT_EQ(d, nullptr);
  EXPECT_NE(std::strlen(t4c_last_error()), 0u);
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  EXPECT_STREQ(t4c_last_error(), "");
  t4c_dataset_free(d);
}

TEST(CApi, NullArgumentsAreUsageErrors) {
  EXPECT_EQ(t4c_synth_generate(nullptr, nullptr), T4C_ERR_USAGE);
  EXPECT_EQ(t4c_dataset_counts(nullptr, nullptr, nullptr, nullptr, nullptr), T4C_ERR_USAGE);
  EXPECT_EQ(t4c_compact(nullptr, nullptr, nullptr), T4C_ERR_USAGE);
  t4c_dataset_free(nullptr);
  t4c_mapping_free(nullptr);
  t4c_extended_free(nullptr);
  t4c_model_free(nullptr);
  t4c_string_free(nullptr);
}

TEST(CApi, StatusKinds) {
  t4c_dataset* d = nullptr;
  EXPECT_EQ(t4c_synth_generate("{not json", &d), T4C_ERR_PARSE);
  EXPECT_EQ(t4c_synth_generate(R"({"grid_w": 0})", &d), T4C_ERR_VALIDATION);
  const auto dir = scratch("kinds");
  std::ofstream(dir / "bad.json") << "{\"nodes\": [";
  EXPECT_EQ(t4c_dataset_load((dir / "bad.json").c_str(), &d), T4C_ERR_PARSE);
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  t4c_extended* x = nullptr;
  EXPECT_EQ(t4c_supergraph_build(d, "4", 0, &x), T4C_ERR_USAGE);
  t4c_dataset_free(d);
}

TEST(CApi, DatasetLifecycle) {
  const auto dir = scratch("dataset");
  t4c_dataset* d = nullptr;
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  size_t nodes = 0, edges = 0, segments = 0, samples = 0;
  ASSERT_EQ(t4c_dataset_counts(d, &nodes, &edges, &segments, &samples), T4C_OK);
  EXPECT_GE(nodes, 9u);
  EXPECT_EQ(segments, 8u);
  EXPECT_EQ(samples, 4u);
  char* report = nullptr;
  ASSERT_EQ(t4c_dataset_validate(d, &report), T4C_OK);
  EXPECT_NE(std::string(report).find("\"ok\":true"), std::string::npos) << report;
  t4c_string_free(report);

  const auto path = dir / "city.json";
  ASSERT_EQ(t4c_dataset_save(d, path.c_str()), T4C_OK);
  t4c_dataset* back = nullptr;
  ASSERT_EQ(t4c_dataset_load(path.c_str(), &back), T4C_OK);
  ASSERT_EQ(t4c_dataset_save(back, (dir / "again.json").c_str()), T4C_OK);
  EXPECT_EQ(slurp(path), slurp(dir / "again.json"));
  t4c_dataset_free(back);
  t4c_dataset_free(d);
}

TEST(CApi, CompactAndExpand) {
  const auto dir = scratch("compact");
  t4c_dataset* d = nullptr;
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  t4c_dataset* c = nullptr;
  t4c_mapping* m = nullptr;
  ASSERT_EQ(t4c_compact(d, &c, &m), T4C_OK);
  size_t ncomp = 0, norig = 0, edges = 0;
  ASSERT_EQ(t4c_mapping_sizes(m, &ncomp, &norig), T4C_OK);
  ASSERT_EQ(t4c_dataset_counts(d, nullptr, &edges, nullptr, nullptr), T4C_OK);
  EXPECT_EQ(norig, edges);
  ASSERT_EQ(t4c_dataset_counts(c, nullptr, &edges, nullptr, nullptr), T4C_OK);
  EXPECT_EQ(ncomp, edges);
  EXPECT_LE(ncomp, norig);

  std::vector<double> values(ncomp * 2), out(norig * 2, -1.0);
  for (size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
  ASSERT_EQ(t4c_mapping_expand(m, values.data(), 2, out.data()), T4C_OK);
  for (double v : out) EXPECT_GE(v, 0.0);

  ASSERT_EQ(t4c_mapping_save(m, (dir / "map.json").c_str()), T4C_OK);
  t4c_mapping* m2 = nullptr;
  ASSERT_EQ(t4c_mapping_load((dir / "map.json").c_str(), &m2), T4C_OK);
  std::vector<double> out2(norig * 2);
  ASSERT_EQ(t4c_mapping_expand(m2, values.data(), 2, out2.data()), T4C_OK);
  EXPECT_EQ(out, out2);
  t4c_mapping_free(m2);
  t4c_mapping_free(m);
  t4c_dataset_free(c);
  t4c_dataset_free(d);
}

TEST(CApi, SupergraphRoundTrip) {
  const auto dir = scratch("super");
  t4c_dataset* d = nullptr;
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  for (const char* a : {"none", "1", "2", "3", "1+2"}) {
    t4c_extended* x = nullptr;
    ASSERT_EQ(t4c_supergraph_build(d, a, 0, &x), T4C_OK) << a;
    size_t nodes = 0, edges = 0;
    ASSERT_EQ(t4c_extended_counts(x, &nodes, &edges), T4C_OK);
    if (std::string(a) == "2") {
      EXPECT_EQ(nodes, 8u);
    }
    const auto path = dir / (std::string("x") + a + ".json");
    ASSERT_EQ(t4c_extended_save(x, path.c_str()), T4C_OK);
    t4c_extended* y = nullptr;
    ASSERT_EQ(t4c_extended_load(path.c_str(), &y), T4C_OK);
    size_t n2 = 0, e2 = 0;
    ASSERT_EQ(t4c_extended_counts(y, &n2, &e2), T4C_OK);
    EXPECT_EQ(n2, nodes);
    EXPECT_EQ(e2, edges);
    t4c_extended_free(y);
    t4c_extended_free(x);
  }
  t4c_dataset_free(d);
}

struct Lines {
  std::vector<std::string> lines;
};

void collect(const char* line, void* user) { static_cast<Lines*>(user)->lines.emplace_back(line); }

TEST(CApi, TrainPredictEval) {
  const auto dir = scratch("train");
  t4c_dataset* d = nullptr;
  ASSERT_EQ(t4c_synth_generate(kSpec, &d), T4C_OK);
  t4c_extended* x = nullptr;
  ASSERT_EQ(t4c_supergraph_build(d, "2", 0, &x), T4C_OK);
  const auto data = dir / "x2.json";
  ASSERT_EQ(t4c_extended_save(x, data.c_str()), T4C_OK);
  t4c_extended_free(x);
  t4c_dataset_free(d);

  const char* cfg = R"({"epochs": 2, "model": {"hidden_dim": 6, "mlp_hidden": 6}})";
  Lines log;
  const double split = 0.75;
  const uint64_t seed = 3;
  ASSERT_EQ(t4c_train(data.c_str(), cfg, nullptr, (dir / "run").c_str(), &split, &seed, collect, &log),
            T4C_OK)
      << t4c_last_error();
  EXPECT_EQ(log.lines.size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "run" / "last.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "run" / "epoch_0002.ckpt"));
  const std::string log_file = slurp(dir / "run" / "log.jsonl");
  EXPECT_EQ(std::count(log_file.begin(), log_file.end(), '\n'), 3);

  t4c_model* m = nullptr;
  ASSERT_EQ(t4c_model_load((dir / "run" / "last.ckpt").c_str(), &m), T4C_OK);
  size_t params = 0;
  ASSERT_EQ(t4c_model_num_parameters(m, &params), T4C_OK);
  EXPECT_GT(params, 0u);
  char* hash = nullptr;
  ASSERT_EQ(t4c_model_config_hash(m, &hash), T4C_OK);
  EXPECT_EQ(std::strlen(hash), 16u);
  t4c_string_free(hash);
  t4c_model_free(m);

  const auto preds = dir / "preds.json";
  ASSERT_EQ(t4c_predict((dir / "run" / "last.ckpt").c_str(), data.c_str(), preds.c_str(), 2), T4C_OK);
  ASSERT_EQ(t4c_eval(data.c_str(), preds.c_str(), (dir / "metrics.json").c_str()), T4C_OK);
  EXPECT_NE(slurp(dir / "metrics.json").find("accuracy"), std::string::npos);

  // Two more epochs from the checkpoint with the same config.
  Lines more;
  ASSERT_EQ(t4c_train(data.c_str(), cfg, (dir / "run" / "last.ckpt").c_str(), (dir / "run2").c_str(),
                      &split, &seed, collect, &more),
            T4C_OK)
      << t4c_last_error();
  EXPECT_EQ(more.lines.size(), 2u);
  const char* other = R"({"epochs": 2, "lr": 0.01, "model": {"hidden_dim": 6, "mlp_hidden": 6}})";
  EXPECT_EQ(t4c_train(data.c_str(), other, (dir / "run" / "last.ckpt").c_str(), (dir / "run3").c_str(),
                      &split, &seed, nullptr, nullptr),
            T4C_ERR_VALIDATION);
}

TEST(CApi, ManifestAndHash) {
  const auto dir = scratch("manifest");
  const auto input = dir / "in.txt";
  std::ofstream(input) << "abc";
  const std::string in_str = input.string();
  const char* inputs[] = {in_str.c_str()};
  const auto out = dir / "out.json";
  ASSERT_EQ(t4c_manifest_write(out.c_str(), "t4c test", R"({"b": 1, "a": 2})", inputs, 1, 7), T4C_OK);
  const std::string text = slurp(dir / "out.json.manifest.json");
  for (const char* key : {"tool_version", "command", "config_hash", "inputs", "seed", "timestamp_utc"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  // FNV-1a 64 of "abc".
  EXPECT_NE(text.find("e71fa2190541574b"), std::string::npos) << text;
  char* h1 = nullptr;
  char* h2 = nullptr;
  ASSERT_EQ(t4c_config_hash(R"({"b": 1, "a": 2})", &h1), T4C_OK);
  ASSERT_EQ(t4c_config_hash(R"({"a":2,"b":1})", &h2), T4C_OK);
  EXPECT_STREQ(h1, h2);
  t4c_string_free(h1);
  t4c_string_free(h2);
}

}  // namespace
