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

#ifndef T4C_T4C_H_
#define T4C_T4C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(T4C_BUILDING_LIBRARY)
#define T4C_API __attribute__((visibility("default")))
#else
#define T4C_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum t4c_status {
  T4C_OK = 0,
  T4C_ERR_USAGE = 1,
  T4C_ERR_VALIDATION = 2,
  T4C_ERR_IO = 3,
  T4C_ERR_PARSE = 4,
  T4C_ERR_STATE = 5,
  T4C_ERR_INTERNAL = 6
} t4c_status;

typedef struct t4c_dataset t4c_dataset;
typedef struct t4c_mapping t4c_mapping;
typedef struct t4c_extended t4c_extended;
typedef struct t4c_model t4c_model;

/* Receives one JSON line per training epoch. */
typedef void (*t4c_log_fn)(const char* json_line, void* user);

T4C_API const char* t4c_version(void);
/* Message of the last failed call on this thread; "" after success. */
T4C_API const char* t4c_last_error(void);

/* Datasets */
T4C_API int t4c_synth_generate(const char* spec_json, t4c_dataset** out);
T4C_API int t4c_dataset_load(const char* path, t4c_dataset** out);
T4C_API int t4c_dataset_save(const t4c_dataset* dataset, const char* path);
T4C_API int t4c_dataset_counts(const t4c_dataset* dataset, size_t* nodes, size_t* edges,
                               size_t* segments, size_t* samples);
T4C_API int t4c_dataset_validate(const t4c_dataset* dataset, char** report_json);
T4C_API void t4c_dataset_free(t4c_dataset* dataset);

/* Compaction */
T4C_API int t4c_compact(const t4c_dataset* in, t4c_dataset** out, t4c_mapping** mapping);
T4C_API int t4c_mapping_save(const t4c_mapping* mapping, const char* path);
T4C_API int t4c_mapping_load(const char* path, t4c_mapping** out);
T4C_API int t4c_mapping_sizes(const t4c_mapping* mapping, size_t* compact, size_t* original);
/* values: num_compact rows of `width`; out: num_original rows, caller-allocated. */
T4C_API int t4c_mapping_expand(const t4c_mapping* mapping, const double* values, size_t width,
                               double* out);
T4C_API void t4c_mapping_free(t4c_mapping* mapping);

/* Supergraphs; approach is "none", "1", "2", "3" or "1+2". */
T4C_API int t4c_supergraph_build(const t4c_dataset* dataset, const char* approach,
                                 int symmetric, t4c_extended** out);
T4C_API int t4c_extended_load(const char* path, t4c_extended** out);
T4C_API int t4c_extended_save(const t4c_extended* extended, const char* path);
T4C_API int t4c_extended_counts(const t4c_extended* extended, size_t* extra_nodes,
                                size_t* extra_edges);
T4C_API void t4c_extended_free(t4c_extended* extended);

/* Features of one sample of a dataset or supergraph file, in the binary layout. */
T4C_API int t4c_features_write(const char* data_path, const char* config_json, size_t sample,
                               const char* out_path);

/* Training. resume_path, split_fraction and seed may be NULL. Writes
   checkpoints and log.jsonl into out_dir. */
T4C_API int t4c_train(const char* data_path, const char* config_json, const char* resume_path,
                      const char* out_dir, const double* split_fraction, const uint64_t* seed,
                      t4c_log_fn log, void* user);

T4C_API int t4c_model_load(const char* checkpoint_path, t4c_model** out);
T4C_API int t4c_model_num_parameters(const t4c_model* model, size_t* count);
T4C_API int t4c_model_config_hash(const t4c_model* model, char** hash);
T4C_API void t4c_model_free(t4c_model* model);

T4C_API int t4c_predict(const char* checkpoint_path, const char* data_path, const char* out_path,
                        int threads);
T4C_API int t4c_expand_file(const char* predictions_path, const char* mapping_path,
                            const char* out_path);
T4C_API int t4c_eval(const char* data_path, const char* predictions_path, const char* out_path);

/* Writes <output>.manifest.json. config_json may be NULL. */
T4C_API int t4c_manifest_write(const char* output, const char* command, const char* config_json,
                               const char* const* inputs, size_t num_inputs, uint64_t seed);

/* Hash of a JSON document after canonical re-serialization. */
T4C_API int t4c_config_hash(const char* config_json, char** hash);

T4C_API void t4c_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif  // T4C_T4C_H_
