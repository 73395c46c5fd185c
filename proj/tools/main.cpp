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

// t4c: command-line front end over the t4c C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "t4c/t4c.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kIo = 3, kInternal = 4 };

struct Global {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

int exit_code(int status) {
  switch (status) {
    case T4C_OK: return kOk;
    case T4C_ERR_USAGE: return kUsage;
    case T4C_ERR_VALIDATION:
    case T4C_ERR_PARSE:
    case T4C_ERR_STATE: return kValidation;
    case T4C_ERR_IO: return kIo;
    default: return kInternal;
  }
}

struct Failure {
  int status;
};

void check(int status) {
  if (status != T4C_OK) throw Failure{status};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "t4c: cannot read %s\n", path.c_str());
    throw Failure{T4C_ERR_IO};
  }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void manifest(const std::string& out, const std::string& command, const std::string* config,
              const std::vector<std::string>& inputs, std::uint64_t seed) {
  std::vector<const char*> ptrs;
  for (const auto& p : inputs) ptrs.push_back(p.c_str());
  check(t4c_manifest_write(out.c_str(), command.c_str(), config ? config->c_str() : nullptr,
                           ptrs.data(), ptrs.size(), seed));
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Dataset = Handle<t4c_dataset, t4c_dataset_free>;
using Mapping = Handle<t4c_mapping, t4c_mapping_free>;
using Extended = Handle<t4c_extended, t4c_extended_free>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"t4c: road-graph compaction, supergraphs and GNN traffic prediction"};
  app.set_version_flag("--version", std::string(t4c_version()));
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Override the RNG seed");
  app.add_option("--threads", g.threads, "Worker threads for inference")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  std::string in, out, mapping, config, spec, approach, data, resume, checkpoint, predictions;
  std::optional<double> split;
  std::size_t sample = 0;
  bool symmetric = false;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic city");
  synth->add_option("--spec", spec, "City spec JSON")->required();
  synth->add_option("--out", out, "Output dataset")->required();

  auto* compact = app.add_subcommand("compact", "Remove degree-2 nodes and merge their edges");
  compact->add_option("--in", in, "Input dataset")->required();
  compact->add_option("--out", out, "Output dataset")->required();
  compact->add_option("--mapping", mapping, "Output edge mapping")->required();

  auto* super = app.add_subcommand("supergraph", "Extend a road graph with supersegment structure");
  super->add_option("--in", in, "Input dataset")->required();
  super->add_option("--approach", approach, "1, 2, 3 or 1+2")
      ->required()
      ->check(CLI::IsMember({"none", "1", "2", "3", "1+2"}));
  super->add_flag("--symmetric", symmetric, "Add super edges in both directions");
  super->add_option("--out", out, "Output extended graph")->required();

  auto* feats = app.add_subcommand("features", "Write node and edge features of one sample");
  feats->add_option("--in", in, "Dataset or extended graph")->required();
  feats->add_option("--config", config, "Feature config JSON");
  feats->add_option("--sample", sample, "Sample index");
  feats->add_option("--out", out, "Output binary")->required();

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--data", data, "Dataset or extended graph")->required();
  train->add_option("--config", config, "Training config JSON");
  train->add_option("--resume", resume, "Checkpoint to continue from");
  train->add_option("--split-fraction", split, "Override the training split fraction");
  train->add_option("--out", out, "Run directory")->required();

  auto* predict = app.add_subcommand("predict", "Predict class probabilities and ETAs");
  predict->add_option("--checkpoint", checkpoint, "Checkpoint")->required();
  predict->add_option("--in", in, "Dataset or extended graph")->required();
  predict->add_option("--out", out, "Output predictions JSON")->required();

  auto* expand = app.add_subcommand("expand", "Map compact-edge predictions to original edges");
  expand->add_option("--predictions", predictions, "Predictions JSON")->required();
  expand->add_option("--mapping", mapping, "Edge mapping")->required();
  expand->add_option("--out", out, "Output predictions JSON")->required();

  auto* eval = app.add_subcommand("eval", "Score predictions against labels");
  eval->add_option("--in", in, "Dataset or extended graph")->required();
  eval->add_option("--predictions", predictions, "Predictions JSON")->required();
  eval->add_option("--out", out, "Output metrics JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << t4c_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "t4c: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const std::uint64_t seed = g.seed.value_or(0);
  try {
    if (*synth) {
      std::string text = slurp(spec);
      if (g.seed) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_object()) {
          j["seed"] = *g.seed;
          text = j.dump();
        }
      }
      Dataset d;
      check(t4c_synth_generate(text.c_str(), &d.p));
      check(t4c_dataset_save(d.p, out.c_str()));
      const auto j = nlohmann::json::parse(text);
      manifest(out, "synth", &text, {spec}, j.value("seed", std::uint64_t{0}));
      if (!g.quiet) {
        std::size_t n, e, s, k;
        check(t4c_dataset_counts(d.p, &n, &e, &s, &k));
        std::printf("{\"nodes\":%zu,\"edges\":%zu,\"segments\":%zu,\"samples\":%zu}\n", n, e, s, k);
      }
    } else if (*compact) {
      Dataset d, c;
      Mapping m;
      check(t4c_dataset_load(in.c_str(), &d.p));
      check(t4c_compact(d.p, &c.p, &m.p));
      check(t4c_dataset_save(c.p, out.c_str()));
      check(t4c_mapping_save(m.p, mapping.c_str()));
      manifest(out, "compact", nullptr, {in}, seed);
      manifest(mapping, "compact", nullptr, {in}, seed);
      if (!g.quiet) {
        std::size_t n0, e0, n1, e1;
        check(t4c_dataset_counts(d.p, &n0, &e0, nullptr, nullptr));
        check(t4c_dataset_counts(c.p, &n1, &e1, nullptr, nullptr));
        std::printf("{\"nodes_before\":%zu,\"nodes_after\":%zu,\"edges_before\":%zu,\"edges_after\":%zu}\n",
                    n0, n1, e0, e1);
      }
    } else if (*super) {
      Dataset d;
      Extended x;
      check(t4c_dataset_load(in.c_str(), &d.p));
      check(t4c_supergraph_build(d.p, approach.c_str(), symmetric ? 1 : 0, &x.p));
      check(t4c_extended_save(x.p, out.c_str()));
      const std::string cfg = nlohmann::json{{"approach", approach}, {"symmetric", symmetric}}.dump();
      manifest(out, "supergraph", &cfg, {in}, seed);
      if (!g.quiet) {
        std::size_t nodes, edges;
        check(t4c_extended_counts(x.p, &nodes, &edges));
        std::printf("{\"extra_nodes\":%zu,\"extra_edges\":%zu}\n", nodes, edges);
      }
    } else if (*feats) {
      std::string text;
      std::vector<std::string> inputs{in};
      if (!config.empty()) {
        text = slurp(config);
        inputs.push_back(config);
      }
      check(t4c_features_write(in.c_str(), config.empty() ? nullptr : text.c_str(), sample,
                               out.c_str()));
      manifest(out, "features", config.empty() ? nullptr : &text, inputs, seed);
    } else if (*train) {
      std::string text;
      std::vector<std::string> inputs{data};
      if (!config.empty()) {
        text = slurp(config);
        inputs.push_back(config);
      }
      if (!resume.empty()) inputs.push_back(resume);
      std::uint64_t run_seed = seed;
      if (!g.seed && !text.empty()) {
        const auto j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_object()) run_seed = j.value("seed", std::uint64_t{0});
      }
      auto log = [](const char* line, void* user) {
        if (!*static_cast<bool*>(user)) {
          std::puts(line);
          std::fflush(stdout);
        }
      };
      check(t4c_train(data.c_str(), text.empty() ? nullptr : text.c_str(),
                      resume.empty() ? nullptr : resume.c_str(), out.c_str(),
                      split ? &*split : nullptr, g.seed ? &*g.seed : nullptr, log, &g.quiet));
      manifest(out + "/last.ckpt", "train", text.empty() ? nullptr : &text, inputs, run_seed);
    } else if (*predict) {
      check(t4c_predict(checkpoint.c_str(), in.c_str(), out.c_str(), g.threads));
      manifest(out, "predict", nullptr, {checkpoint, in}, seed);
    } else if (*expand) {
      check(t4c_expand_file(predictions.c_str(), mapping.c_str(), out.c_str()));
      manifest(out, "expand", nullptr, {predictions, mapping}, seed);
    } else if (*eval) {
      check(t4c_eval(in.c_str(), predictions.c_str(), out.c_str()));
      manifest(out, "eval", nullptr, {in, predictions}, seed);
      if (!g.quiet) std::cout << slurp(out);
    }
  } catch (const Failure& f) {
    const char* msg = t4c_last_error();
    if (msg && *msg) std::fprintf(stderr, "t4c: %s\n", msg);
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "t4c: %s\n", e.what());
    return kInternal;
  }
  return kOk;
}
