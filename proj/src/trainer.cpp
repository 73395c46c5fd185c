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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "t4c/error.hpp"
#include "t4c/hash.hpp"
#include "t4c/nn/tape.hpp"
#include "t4c/training.hpp"

namespace t4c::training {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void check_config(const TrainConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorKind::kValidation, "train config: " + what); };
  if (!(c.optimizer.lr > 0.0)) bad("lr must be positive");
  if (!(c.optimizer.weight_decay >= 0.0)) bad("weight_decay must be >= 0");
  if (!(c.optimizer.beta1 >= 0.0 && c.optimizer.beta1 < 1.0) ||
      !(c.optimizer.beta2 >= 0.0 && c.optimizer.beta2 < 1.0) || !(c.optimizer.eps > 0.0)) {
    bad("beta1, beta2 must be in [0,1) and eps positive");
  }
  if (!(c.lambda_cc >= 0.0) || !(c.lambda_eta >= 0.0)) bad("loss weights must be >= 0");
  if (!(c.split_fraction > 0.0 && c.split_fraction <= 1.0)) bad("split_fraction must be in (0,1]");
  if (c.epochs < 0) bad("epochs must be >= 0");
  if (c.class_weights) {
    if (c.class_weights->size() != static_cast<std::size_t>(c.model.num_classes)) {
      bad("class_weights needs one entry per class");
    }
    for (double w : *c.class_weights) {
      if (!(w > 0.0)) bad("class_weights must be positive");
    }
  }
  if (c.eta_scale && !(*c.eta_scale > 0.0)) bad("eta_scale must be positive");
  features::check_config(c.features);
}

Json train_config_to_json(const TrainConfig& c) {
  return Json{{"lr", c.optimizer.lr},
              {"weight_decay", c.optimizer.weight_decay},
              {"beta1", c.optimizer.beta1},
              {"beta2", c.optimizer.beta2},
              {"eps", c.optimizer.eps},
              {"class_weights", optional_json(c.class_weights)},
              {"lambda_cc", c.lambda_cc},
              {"lambda_eta", c.lambda_eta},
              {"split_fraction", c.split_fraction},
              {"epochs", c.epochs},
              {"seed", c.seed},
              {"shuffle", c.shuffle},
              {"eta_scale", optional_json(c.eta_scale)},
              {"features", features::config_to_json(c.features)},
              {"model", nn::model_config_to_json(c.model)}};
}

TrainConfig train_config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "train config: expected an object");
  TrainConfig c;
  try {
    c.optimizer.lr = j.value("lr", c.optimizer.lr);
    c.optimizer.weight_decay = j.value("weight_decay", c.optimizer.weight_decay);
    c.optimizer.beta1 = j.value("beta1", c.optimizer.beta1);
    c.optimizer.beta2 = j.value("beta2", c.optimizer.beta2);
    c.optimizer.eps = j.value("eps", c.optimizer.eps);
    if (j.contains("class_weights") && !j["class_weights"].is_null()) {
      c.class_weights = j["class_weights"].get<std::vector<double>>();
    }
    c.lambda_cc = j.value("lambda_cc", c.lambda_cc);
    c.lambda_eta = j.value("lambda_eta", c.lambda_eta);
    c.split_fraction = j.value("split_fraction", c.split_fraction);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.shuffle = j.value("shuffle", c.shuffle);
    if (j.contains("eta_scale") && !j["eta_scale"].is_null()) c.eta_scale = j["eta_scale"].get<double>();
    if (j.contains("features")) c.features = features::config_from_json(j["features"]);
    if (j.contains("model")) c.model = nn::model_config_from_json(j["model"]);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("train config: ") + e.what());
  }
  check_config(c);
  return c;
}

std::string config_hash(const TrainConfig& cfg) {
  Json j = train_config_to_json(cfg);
  j.erase("epochs");
  j.erase("split_fraction");
  return hex64(fnv1a64(j.dump()));
}

Json EpochLog::to_json() const {
  return Json{{"epoch", epoch},
              {"train_loss", optional_json(train_loss)},
              {"val_loss", optional_json(val_loss)},
              {"val_accuracy", optional_json(val_accuracy)},
              {"eta_mae", optional_json(eta_mae)},
              {"wall_ms", wall_ms}};
}

void split_samples(std::span<const Sample> samples, double fraction,
                   std::vector<std::size_t>& train, std::vector<std::size_t>& val) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a].t < samples[b].t; });
  const auto n_train = std::min(
      order.size(),
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(order.size()) + 1e-9)));
  train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
}

std::vector<double> inverse_frequency_weights(std::span<const Sample> samples,
                                              std::span<const std::size_t> indices,
                                              int num_classes) {
  const auto C = static_cast<std::size_t>(num_classes);
  std::vector<double> counts(C, 0.0);
  for (std::size_t i : indices) {
    for (const auto& l : samples[i].edge_labels) {
      if (l && *l >= 0 && static_cast<std::size_t>(*l) < C) counts[static_cast<std::size_t>(*l)] += 1.0;
    }
  }
  std::vector<double> w(C);
  for (std::size_t c = 0; c < C; ++c) w[c] = 1.0 / std::max(counts[c], 1.0);
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(C);
  for (double& x : w) x /= mean;
  return w;
}

Trainer::Trainer(supergraph::ExtendedGraph graph, std::vector<Sample> samples, TrainConfig cfg)
    : graph_(std::move(graph)), samples_(std::move(samples)), cfg_(std::move(cfg)),
      model_([&] {
        cfg_.model.approach = graph_.approach();
        check_config(cfg_);
        return nn::Model(cfg_.model);
      }()),
      inputs_(nn::GraphInputs::from(graph_)),
      rng_(cfg_.seed ^ kShuffleStream) {
  model_.check_compatible(inputs_);
  split_samples(samples_, cfg_.split_fraction, train_, val_);

  std::vector<Sample> train_samples;
  for (std::size_t i : train_) train_samples.push_back(samples_[i]);
  norm_.count_scale = features::max_known_count(train_samples);
  if (cfg_.features.count_scale) norm_.count_scale = *cfg_.features.count_scale;
  norm_.class_weights = cfg_.class_weights
                            ? *cfg_.class_weights
                            : inverse_frequency_weights(samples_, train_, cfg_.model.num_classes);
  if (cfg_.eta_scale) {
    norm_.eta_scale = *cfg_.eta_scale;
  } else {
    double total = 0.0;
    std::size_t n = 0;
    for (const Sample& s : train_samples) {
      for (const auto& eta : s.segment_etas) {
        if (eta) {
          total += *eta;
          ++n;
        }
      }
    }
    norm_.eta_scale = n ? total / static_cast<double>(n) : 1.0;
  }
  model_.init_parameters(params_, cfg_.seed);
  prepare();
}

Trainer::Trainer(supergraph::ExtendedGraph graph, std::vector<Sample> samples, TrainConfig cfg,
                 const Checkpoint& ckpt)
    : graph_(std::move(graph)), samples_(std::move(samples)), cfg_(std::move(cfg)),
      model_([&] {
        cfg_.model.approach = graph_.approach();
        check_config(cfg_);
        return nn::Model(cfg_.model);
      }()),
      inputs_(nn::GraphInputs::from(graph_)),
      params_(ckpt.params),
      adam_(ckpt.adam),
      norm_(ckpt.norm),
      epoch_(ckpt.epoch),
      fresh_(false) {
  if (config_hash(cfg_) != ckpt.config_hash) {
    fail(ErrorKind::kValidation, "resume: config hash " + config_hash(cfg_) +
                                     " does not match checkpoint " + ckpt.config_hash);
  }
  ParameterStore expected;
  model_.init_parameters(expected, cfg_.seed);
  if (expected.size() != params_.size()) fail(ErrorKind::kValidation, "resume: parameter set differs");
  for (const auto& [name, e] : expected.entries()) {
    if (!params_.contains(name) || !params_.at(name).value.same_shape(e.value)) {
      fail(ErrorKind::kValidation, "resume: parameter '" + name + "' missing or reshaped");
    }
  }
  model_.check_compatible(inputs_);
  rng_.set_state(ckpt.rng_state);
  split_samples(samples_, cfg_.split_fraction, train_, val_);
  prepare();
}

void Trainer::prepare() {
  if (static_cast<int>(norm_.class_weights.size()) != cfg_.model.num_classes) {
    fail(ErrorKind::kValidation, "class weight count does not match num_classes");
  }
  features::FeatureConfig fc = cfg_.features;
  fc.count_scale = norm_.count_scale;
  edge_feats_ = features::edge_features(graph_.base(), fc);
  node_feats_.clear();
  labels_.clear();
  eta_targets_.clear();
  for (const Sample& s : samples_) {
    node_feats_.push_back(
        features::extended_features(graph_, features::node_features(graph_.base(), s, fc)));
    std::vector<int> y;
    for (const auto& l : s.edge_labels) {
      if (l && (*l < 0 || *l >= cfg_.model.num_classes)) {
        fail(ErrorKind::kValidation, "label outside [0, num_classes)");
      }
      y.push_back(l ? *l : -1);
    }
    labels_.push_back(std::move(y));
    std::vector<std::optional<double>> targets;
    for (const auto& eta : s.segment_etas) {
      targets.push_back(eta ? std::optional<double>(*eta / norm_.eta_scale) : std::nullopt);
    }
    eta_targets_.push_back(std::move(targets));
  }
}

double Trainer::loss_on(std::size_t index, ParameterStore* grads) const {
  nn::Tape tape = grads ? nn::Tape(grads) : nn::Tape(static_cast<const ParameterStore*>(&params_));
  const nn::ForwardResult fr = model_.forward(tape, inputs_, node_feats_[index], edge_feats_);
  nn::Var loss = tape.weighted_cross_entropy(fr.logits, labels_[index], norm_.class_weights);
  if (fr.etas) {
    nn::Var l1 = tape.masked_l1(*fr.etas, eta_targets_[index]);
    loss = tape.weighted_sum(loss, cfg_.lambda_cc, l1, cfg_.lambda_eta);
  }
  if (grads) tape.backward(loss);
  return tape.value(loss).data[0];
}

double Trainer::sample_loss(std::size_t index) const { return loss_on(index, nullptr); }

double Trainer::train_step(std::size_t index) {
  params_.zero_grad();
  const double loss = loss_on(index, &params_);
  adamw_step(params_, adam_, cfg_.optimizer);
  return loss;
}

EpochLog Trainer::validate() const {
  EpochLog log;
  log.epoch = epoch_;
  if (val_.empty()) return log;
  double total = 0.0;
  std::size_t labeled = 0, correct = 0, etas = 0;
  double eta_err = 0.0;
  for (std::size_t i : val_) {
    nn::Tape tape(static_cast<const ParameterStore*>(&params_));
    const nn::ForwardResult fr = model_.forward(tape, inputs_, node_feats_[i], edge_feats_);
    nn::Var loss = tape.weighted_cross_entropy(fr.logits, labels_[i], norm_.class_weights);
    if (fr.etas) {
      nn::Var l1 = tape.masked_l1(*fr.etas, eta_targets_[i]);
      loss = tape.weighted_sum(loss, cfg_.lambda_cc, l1, cfg_.lambda_eta);
      const Tensor& pred = tape.value(*fr.etas);
      for (std::size_t s = 0; s < eta_targets_[i].size(); ++s) {
        if (!eta_targets_[i][s]) continue;
        eta_err += std::abs(pred.data[s] - *eta_targets_[i][s]) * norm_.eta_scale;
        ++etas;
      }
    }
    total += tape.value(loss).data[0];
    const Tensor& logits = tape.value(fr.logits);
    for (std::size_t e = 0; e < logits.rows; ++e) {
      if (labels_[i][e] < 0) continue;
      auto row = logits.row(e);
      const auto pred = std::max_element(row.begin(), row.end()) - row.begin();
      ++labeled;
      if (pred == labels_[i][e]) ++correct;
    }
  }
  log.val_loss = total / static_cast<double>(val_.size());
  if (labeled) log.val_accuracy = static_cast<double>(correct) / static_cast<double>(labeled);
  if (etas) log.eta_mae = eta_err / static_cast<double>(etas);
  return log;
}

std::vector<EpochLog> Trainer::fit(const std::function<void(const EpochLog&)>& on_epoch,
                                   const std::optional<std::filesystem::path>& checkpoint_dir) {
  using Clock = std::chrono::steady_clock;
  std::vector<EpochLog> logs;
  auto emit = [&](EpochLog log) {
    if (on_epoch) on_epoch(log);
    logs.push_back(std::move(log));
  };
  if (fresh_) {
    const auto start = Clock::now();
    EpochLog log = validate();
    log.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    emit(std::move(log));
    fresh_ = false;
  }
  for (int e = 0; e < cfg_.epochs; ++e) {
    const auto start = Clock::now();
    std::vector<std::size_t> order = train_;
    if (cfg_.shuffle) rng_.shuffle(order);
    double total = 0.0;
    for (std::size_t i : order) total += train_step(i);
    ++epoch_;
    EpochLog log = validate();
    if (!order.empty()) log.train_loss = total / static_cast<double>(order.size());
    if (checkpoint_dir) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch_);
      const Checkpoint ckpt = checkpoint();
      const std::string bytes = encode_checkpoint(ckpt);
      write_file(*checkpoint_dir / name, bytes);
      write_file(*checkpoint_dir / "last.ckpt", bytes);
    }
    log.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    emit(std::move(log));
  }
  return logs;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.config = train_config_to_json(cfg_);
  c.config_hash = config_hash(cfg_);
  c.seed = cfg_.seed;
  c.epoch = epoch_;
  c.rng_state = rng_.state();
  c.norm = norm_;
  c.params = params_;
  c.adam = adam_;
  return c;
}

}  // namespace t4c::training
