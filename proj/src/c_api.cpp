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

#include "t4c/t4c.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "t4c/compaction.hpp"
#include "t4c/error.hpp"
#include "t4c/features.hpp"
#include "t4c/hash.hpp"
#include "t4c/io.hpp"
#include "t4c/manifest.hpp"
#include "t4c/supergraph.hpp"
#include "t4c/synth.hpp"
#include "t4c/training.hpp"

struct t4c_dataset {
  t4c::Dataset value;
};
struct t4c_mapping {
  t4c::compaction::EdgeMapping value;
};
struct t4c_extended {
  t4c::supergraph::ExtendedDataset value;
};
struct t4c_model {
  t4c::training::Checkpoint ckpt;
};

namespace {

using namespace t4c;

thread_local std::string g_last_error;

int status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return T4C_ERR_USAGE;
    case ErrorKind::kValidation: return T4C_ERR_VALIDATION;
    case ErrorKind::kParse: return T4C_ERR_PARSE;
    case ErrorKind::kIo: return T4C_ERR_IO;
    case ErrorKind::kState: return T4C_ERR_STATE;
  }
  return T4C_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return T4C_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return T4C_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return T4C_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::kUsage, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json parse_text(const char* text, const char* name) {
  need(text, name);
  return parse_json(text, name);
}

}  // namespace

extern "C" {

const char* t4c_version(void) { return kVersion; }

const char* t4c_last_error(void) { return g_last_error.c_str(); }

void t4c_string_free(char* s) { delete[] s; }

int t4c_synth_generate(const char* spec_json, t4c_dataset** out) {
  return guarded([&] {
    need(out, "out");
    const synth::CitySpec spec = synth::spec_from_json(parse_text(spec_json, "spec"));
    *out = new t4c_dataset{synth::generate_city(spec)};
  });
}

int t4c_dataset_load(const char* path, t4c_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new t4c_dataset{load_dataset(path)};
  });
}

int t4c_dataset_save(const t4c_dataset* dataset, const char* path) {
  return guarded([&] {
    need(dataset, "dataset");
    need(path, "path");
    save_dataset(dataset->value, path);
  });
}

int t4c_dataset_counts(const t4c_dataset* dataset, size_t* nodes, size_t* edges,
                       size_t* segments, size_t* samples) {
  return guarded([&] {
    need(dataset, "dataset");
    const Dataset& d = dataset->value;
    if (nodes) *nodes = d.graph.num_nodes();
    if (edges) *edges = d.graph.num_edges();
    if (segments) *segments = d.segments.segments.size();
    if (samples) *samples = d.samples.size();
  });
}

int t4c_dataset_validate(const t4c_dataset* dataset, char** report_json) {
  return guarded([&] {
    need(dataset, "dataset");
    need(report_json, "report_json");
    const ValidationReport r = validate(dataset->value);
    *report_json = dup_string(Json{{"ok", r.ok()}, {"violations", r.violations}}.dump());
  });
}

void t4c_dataset_free(t4c_dataset* dataset) { delete dataset; }

int t4c_compact(const t4c_dataset* in, t4c_dataset** out, t4c_mapping** mapping) {
  return guarded([&] {
    need(in, "in");
    need(out, "out");
    compaction::EdgeMapping m;
    auto result = std::make_unique<t4c_dataset>(t4c_dataset{compaction::compact_dataset(in->value, &m)});
    if (mapping) *mapping = new t4c_mapping{std::move(m)};
    *out = result.release();
  });
}

int t4c_mapping_save(const t4c_mapping* mapping, const char* path) {
  return guarded([&] {
    need(mapping, "mapping");
    need(path, "path");
    write_file(path, compaction::mapping_to_json(mapping->value).dump() + "\n");
  });
}

int t4c_mapping_load(const char* path, t4c_mapping** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new t4c_mapping{compaction::mapping_from_json(parse_json(read_file(path), path))};
  });
}

int t4c_mapping_sizes(const t4c_mapping* mapping, size_t* compact, size_t* original) {
  return guarded([&] {
    need(mapping, "mapping");
    if (compact) *compact = mapping->value.num_compact();
    if (original) *original = mapping->value.num_original();
  });
}

int t4c_mapping_expand(const t4c_mapping* mapping, const double* values, size_t width, double* out) {
  return guarded([&] {
    need(mapping, "mapping");
    need(out, "out");
    const std::size_t n = mapping->value.num_compact() * width;
    if (n) need(values, "values");
    const auto expanded = compaction::expand_predictions(std::span<const double>(values, n), width,
                                                         mapping->value);
    std::copy(expanded.begin(), expanded.end(), out);
  });
}

void t4c_mapping_free(t4c_mapping* mapping) { delete mapping; }

int t4c_supergraph_build(const t4c_dataset* dataset, const char* approach, int symmetric,
                         t4c_extended** out) {
  return guarded([&] {
    need(dataset, "dataset");
    need(approach, "approach");
    need(out, "out");
    supergraph::BuildOptions options;
    options.symmetric_super_edges = symmetric != 0;
    const Dataset& d = dataset->value;
    auto g = supergraph::build(supergraph::parse_approach(approach), d.graph, d.segments, options);
    *out = new t4c_extended{{std::move(g), d.samples}};
  });
}

int t4c_extended_load(const char* path, t4c_extended** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new t4c_extended{supergraph::load_extended(path)};
  });
}

int t4c_extended_save(const t4c_extended* extended, const char* path) {
  return guarded([&] {
    need(extended, "extended");
    need(path, "path");
    write_file(path, supergraph::serialize_extended(extended->value.graph, extended->value.samples));
  });
}

int t4c_extended_counts(const t4c_extended* extended, size_t* extra_nodes, size_t* extra_edges) {
  return guarded([&] {
    need(extended, "extended");
    const auto a = supergraph::count_additions(extended->value.graph);
    if (extra_nodes) *extra_nodes = a.nodes;
    if (extra_edges) *extra_edges = a.edges;
  });
}

void t4c_extended_free(t4c_extended* extended) { delete extended; }

int t4c_features_write(const char* data_path, const char* config_json, size_t sample,
                       const char* out_path) {
  return guarded([&] {
    need(data_path, "data_path");
    need(out_path, "out_path");
    const auto data = supergraph::load_extended(data_path);
    features::FeatureConfig cfg;
    if (config_json) cfg = features::config_from_json(parse_text(config_json, "feature config"));
    cfg = features::resolve(cfg, data.samples);
    if (sample >= data.samples.size()) {
      fail(ErrorKind::kValidation, "sample index " + std::to_string(sample) + " out of range (" +
                                  std::to_string(data.samples.size()) + " samples)");
    }
    const auto& g = data.graph;
    const auto node = features::extended_features(
        g, features::node_features(g.base(), data.samples[sample], cfg));
    features::write_binary(out_path, node, features::edge_features(g.base(), cfg));
  });
}

int t4c_train(const char* data_path, const char* config_json, const char* resume_path,
              const char* out_dir, const double* split_fraction, const uint64_t* seed,
              t4c_log_fn log, void* user) {
  return guarded([&] {
    need(data_path, "data_path");
    need(out_dir, "out_dir");
    training::TrainConfig cfg;
    if (config_json) {
      Json j = parse_text(config_json, "train config");
      if (split_fraction) j["split_fraction"] = *split_fraction;
      if (seed) j["seed"] = *seed;
      cfg = training::train_config_from_json(j);
    } else {
      if (split_fraction) cfg.split_fraction = *split_fraction;
      if (seed) cfg.seed = *seed;
      training::check_config(cfg);
    }
    auto data = supergraph::load_extended(data_path);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

    std::unique_ptr<training::Trainer> trainer;
    if (resume_path) {
      const auto ckpt = training::load_checkpoint(resume_path);
      trainer = std::make_unique<training::Trainer>(std::move(data.graph), std::move(data.samples),
                                                    cfg, ckpt);
    } else {
      trainer = std::make_unique<training::Trainer>(std::move(data.graph), std::move(data.samples),
                                                    cfg);
    }
    std::ofstream out(dir / "log.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + (dir / "log.jsonl").string());
    trainer->fit(
        [&](const training::EpochLog& e) {
          const std::string line = e.to_json().dump();
          out << line << "\n";
          out.flush();
          if (log) log(line.c_str(), user);
        },
        dir);
    if (!out) fail(ErrorKind::kIo, "write failed: " + (dir / "log.jsonl").string());
    training::save_checkpoint(trainer->checkpoint(), dir / "last.ckpt");
  });
}

int t4c_model_load(const char* checkpoint_path, t4c_model** out) {
  return guarded([&] {
    need(checkpoint_path, "checkpoint_path");
    need(out, "out");
    *out = new t4c_model{training::load_checkpoint(checkpoint_path)};
  });
}

int t4c_model_num_parameters(const t4c_model* model, size_t* count) {
  return guarded([&] {
    need(model, "model");
    need(count, "count");
    *count = model->ckpt.params.num_scalars();
  });
}

int t4c_model_config_hash(const t4c_model* model, char** hash) {
  return guarded([&] {
    need(model, "model");
    need(hash, "hash");
    *hash = dup_string(model->ckpt.config_hash);
  });
}

void t4c_model_free(t4c_model* model) { delete model; }

int t4c_predict(const char* checkpoint_path, const char* data_path, const char* out_path,
                int threads) {
  return guarded([&] {
    need(checkpoint_path, "checkpoint_path");
    need(data_path, "data_path");
    need(out_path, "out_path");
    const training::Predictor predictor(training::load_checkpoint(checkpoint_path));
    const auto data = supergraph::load_extended(data_path);
    const auto preds = predictor.predict_all(data.graph, data.samples, threads);
    write_file(out_path, training::predictions_to_json(preds).dump() + "\n");
  });
}

int t4c_expand_file(const char* predictions_path, const char* mapping_path, const char* out_path) {
  return guarded([&] {
    need(predictions_path, "predictions_path");
    need(mapping_path, "mapping_path");
    need(out_path, "out_path");
    auto preds = training::predictions_from_json(
        parse_json(read_file(predictions_path), predictions_path));
    const auto mapping =
        compaction::mapping_from_json(parse_json(read_file(mapping_path), mapping_path));
    for (auto& p : preds) {
      if (p.probs.rows != mapping.num_compact()) {
        fail(ErrorKind::kValidation, "predictions have " + std::to_string(p.probs.rows) +
                                         " edges, mapping expects " +
                                         std::to_string(mapping.num_compact()));
      }
      const std::size_t width = p.probs.cols;
      auto values = compaction::expand_predictions(p.probs.data, width, mapping);
      p.probs = nn::Tensor{mapping.num_original(), width, std::move(values)};
    }
    write_file(out_path, training::predictions_to_json(preds).dump() + "\n");
  });
}

int t4c_eval(const char* data_path, const char* predictions_path, const char* out_path) {
  return guarded([&] {
    need(data_path, "data_path");
    need(predictions_path, "predictions_path");
    need(out_path, "out_path");
    const auto data = supergraph::load_extended(data_path);
    const auto preds = training::predictions_from_json(
        parse_json(read_file(predictions_path), predictions_path));
    if (preds.empty()) fail(ErrorKind::kValidation, "no predictions");
    const auto m = training::evaluate(preds, data.samples, static_cast<int>(preds[0].probs.cols));
    write_file(out_path, training::metrics_to_json(m).dump(2) + "\n");
  });
}

int t4c_manifest_write(const char* output, const char* command, const char* config_json,
                       const char* const* inputs, size_t num_inputs, uint64_t seed) {
  return guarded([&] {
    need(output, "output");
    need(command, "command");
    if (num_inputs) need(inputs, "inputs");
    std::string hash;
    if (config_json) hash = hex64(fnv1a64(parse_text(config_json, "config").dump()));
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < num_inputs; ++i) {
      need(inputs[i], "input path");
      paths.emplace_back(inputs[i]);
    }
    write_manifest(output, make_manifest(command, hash, paths, seed));
  });
}

int t4c_config_hash(const char* config_json, char** hash) {
  return guarded([&] {
    need(hash, "hash");
    *hash = dup_string(hex64(fnv1a64(parse_text(config_json, "config").dump())));
  });
}

}  // extern "C"
