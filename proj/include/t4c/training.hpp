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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "t4c/features.hpp"
#include "t4c/io.hpp"
#include "t4c/nn/model.hpp"
#include "t4c/nn/params.hpp"
#include "t4c/rng.hpp"
#include "t4c/supergraph.hpp"

namespace t4c::training {

using nn::ParameterStore;
using nn::Tensor;

// ---- Losses on plain tensors (each runs a one-op tape). ----

// Mean over labeled rows of w[y] * -log softmax(row)[y]; 0 without labels.
double weighted_cross_entropy(const Tensor& logits, std::span<const std::optional<int>> labels,
                              std::span<const double> class_weights);
// Mean |pred - target| over present targets; 0 without targets.
double eta_l1(std::span<const double> pred, std::span<const std::optional<double>> targets);
inline double combined_loss(double ce, double l1, double lambda_cc, double lambda_eta) {
  return lambda_cc * ce + lambda_eta * l1;
}

// ---- AdamW ----

struct AdamWConfig {
  double lr = 5e-4;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One decoupled step at time t >= 1 (moments updated in place):
//   m = b1 m + (1-b1) g,  v = b2 v + (1-b2) g^2
//   theta -= lr * m_hat / (sqrt(v_hat) + eps) + lr * wd * theta
void adamw_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, const AdamWConfig& cfg, std::int64_t t);

struct AdamState {
  std::int64_t step = 0;
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
};

// Increments state.step and updates every parameter from its grad buffer.
void adamw_step(ParameterStore& params, AdamState& state, const AdamWConfig& cfg);

// ---- Configuration ----

struct TrainConfig {
  AdamWConfig optimizer;
  std::optional<std::vector<double>> class_weights;  // unset: inverse frequency, mean 1
  double lambda_cc = 1.0;
  double lambda_eta = 1.0;
  double split_fraction = 0.8;
  int epochs = 10;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::optional<double> eta_scale;  // unset: mean training ETA
  features::FeatureConfig features;
  nn::ModelConfig model;
};

void check_config(const TrainConfig& cfg);
Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& json);

// Hash over everything that fixes the optimization trajectory except the
// epoch count and the split fraction, which may change on resume.
std::string config_hash(const TrainConfig& cfg);

// Values derived from the training split on a fresh start and carried
// through checkpoints unchanged.
struct Normalization {
  double count_scale = 1.0;
  double eta_scale = 1.0;
  std::vector<double> class_weights;
};

// ---- Checkpoints ----

struct Checkpoint {
  Json config;  // train_config_to_json of the run
  std::string config_hash;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::string rng_state;
  Normalization norm;
  ParameterStore params;
  AdamState adam;
};

// 8-byte magic "T4CCKPT1", little-endian u64 header length, JSON header,
// then little-endian f64 blobs: parameter values in name order, followed by
// the first and second moment buffers in the same order.
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ---- Prediction and metrics ----

struct SamplePrediction {
  std::int64_t t = 0;
  Tensor probs;                               // (E, C)
  std::optional<std::vector<double>> etas;    // seconds
};

struct Metrics {
  double ce = 0.0;  // unweighted masked CE over labeled edges
  std::vector<std::optional<double>> ce_per_class;
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::optional<double> eta_mae;
  std::size_t labeled_edges = 0;
  std::size_t labeled_segments = 0;
};

// Sums run over sorted terms, so sample order does not change any bit.
Metrics evaluate(std::span<const SamplePrediction> predictions, std::span<const Sample> samples,
                 int num_classes);
Json metrics_to_json(const Metrics& m);

Json predictions_to_json(std::span<const SamplePrediction> predictions);
std::vector<SamplePrediction> predictions_from_json(const Json& json);

// Runs a checkpointed model on new data.
class Predictor {
 public:
  explicit Predictor(const Checkpoint& ckpt);

  const nn::ModelConfig& model_config() const { return model_.config(); }
  const ParameterStore& params() const { return params_; }

  SamplePrediction predict(const supergraph::ExtendedGraph& graph, const Sample& sample) const;
  std::vector<SamplePrediction> predict_all(const supergraph::ExtendedGraph& graph,
                                            std::span<const Sample> samples, int threads = 1) const;

 private:
  nn::Model model_;
  ParameterStore params_;
  features::FeatureConfig features_;
  double eta_scale_;
};

// ---- Training loop ----

struct EpochLog {
  int epoch = 0;
  std::optional<double> train_loss;
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;
  std::optional<double> eta_mae;
  double wall_ms = 0.0;

  Json to_json() const;
};

// Batch size 1 trainer. Samples are ordered by timestamp and the first
// split_fraction of them form the training set; training order is
// reshuffled every epoch from a seeded stream saved in checkpoints.
class Trainer {
 public:
  Trainer(supergraph::ExtendedGraph graph, std::vector<Sample> samples, TrainConfig cfg);
  // Continues from `ckpt`; `cfg` may differ in epochs and split_fraction only.
  Trainer(supergraph::ExtendedGraph graph, std::vector<Sample> samples, TrainConfig cfg,
          const Checkpoint& ckpt);

  // Runs cfg.epochs epochs. With an output directory, each epoch writes
  // epoch_NNNN.ckpt and last.ckpt there.
  std::vector<EpochLog> fit(const std::function<void(const EpochLog&)>& on_epoch = {},
                            const std::optional<std::filesystem::path>& checkpoint_dir = {});

  // Loss, accuracy and ETA error of the current parameters on the
  // validation split (empty fields when the split is empty).
  EpochLog validate() const;

  // One optimizer step on sample `index`; returns its loss.
  double train_step(std::size_t index);

  Checkpoint checkpoint() const;

  const ParameterStore& params() const { return params_; }
  ParameterStore& mutable_params() { return params_; }
  const nn::Model& model() const { return model_; }
  const Normalization& normalization() const { return norm_; }
  const std::vector<std::size_t>& train_indices() const { return train_; }
  const std::vector<std::size_t>& val_indices() const { return val_; }
  int epoch() const { return epoch_; }
  std::int64_t step() const { return adam_.step; }

  // Loss of the training objective on one sample, without an update.
  double sample_loss(std::size_t index) const;

 private:
  void prepare();
  double loss_on(std::size_t index, ParameterStore* grads) const;

  supergraph::ExtendedGraph graph_;
  std::vector<Sample> samples_;
  TrainConfig cfg_;
  nn::Model model_;
  nn::GraphInputs inputs_;
  ParameterStore params_;
  AdamState adam_;
  Normalization norm_;
  Rng rng_;
  int epoch_ = 0;
  bool fresh_ = true;
  std::vector<std::size_t> train_;
  std::vector<std::size_t> val_;
  Tensor edge_feats_;
  std::vector<Tensor> node_feats_;
  std::vector<std::vector<int>> labels_;
  std::vector<std::vector<std::optional<double>>> eta_targets_;  // scaled
};

// Temporal split: indices sorted by (t, position), first floor(f * n) train.
void split_samples(std::span<const Sample> samples, double fraction,
                   std::vector<std::size_t>& train, std::vector<std::size_t>& val);

// Inverse class frequency over labeled edges, normalized to mean 1.
std::vector<double> inverse_frequency_weights(std::span<const Sample> samples,
                                              std::span<const std::size_t> indices,
                                              int num_classes);

}  // namespace t4c::training
