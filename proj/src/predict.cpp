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
#include <cmath>
#include <thread>

#include "t4c/error.hpp"
#include "t4c/nn/tape.hpp"
#include "t4c/training.hpp"

namespace t4c::training {

namespace {

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows, logits.cols);
  for (std::size_t r = 0; r < logits.rows; ++r) {
    auto row = logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    for (std::size_t c = 0; c < logits.cols; ++c) out.at(r, c) = std::exp(row[c] - mx) / z;
  }
  return out;
}

}  // namespace

Metrics evaluate(std::span<const SamplePrediction> predictions, std::span<const Sample> samples,
                 int num_classes) {
  if (predictions.size() != samples.size()) {
    fail(ErrorKind::kValidation, "evaluate: prediction and sample counts differ");
  }
  const auto C = static_cast<std::size_t>(num_classes);
  Metrics m;
  m.confusion.assign(C, std::vector<std::size_t>(C, 0));
  std::vector<double> ce_terms;
  std::vector<std::vector<double>> class_terms(C);
  std::vector<double> eta_errors;
  std::size_t correct = 0;

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const SamplePrediction& p = predictions[k];
    const Sample& s = samples[k];
    if (p.probs.rows != s.edge_labels.size() || p.probs.cols != C) {
      fail(ErrorKind::kValidation, "evaluate: prediction shape does not match labels");
    }
    for (std::size_t e = 0; e < s.edge_labels.size(); ++e) {
      if (!s.edge_labels[e]) continue;
      const int y = *s.edge_labels[e];
      if (y < 0 || static_cast<std::size_t>(y) >= C) {
        fail(ErrorKind::kValidation, "evaluate: label outside [0, num_classes)");
      }
      const auto row = p.probs.row(e);
      const double term = -std::log(std::max(row[static_cast<std::size_t>(y)], 1e-300));
      ce_terms.push_back(term);
      class_terms[static_cast<std::size_t>(y)].push_back(term);
      const auto pred = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      ++m.confusion[static_cast<std::size_t>(y)][pred];
      if (pred == static_cast<std::size_t>(y)) ++correct;
    }
    if (p.etas) {
      if (p.etas->size() != s.segment_etas.size()) {
        fail(ErrorKind::kValidation, "evaluate: eta count does not match segments");
      }
      for (std::size_t i = 0; i < s.segment_etas.size(); ++i) {
        if (s.segment_etas[i]) eta_errors.push_back(std::abs((*p.etas)[i] - *s.segment_etas[i]));
      }
    }
  }
  m.labeled_edges = ce_terms.size();
  m.labeled_segments = eta_errors.size();
  if (!ce_terms.empty()) {
    const auto n = static_cast<double>(ce_terms.size());
    m.ce = sorted_sum(ce_terms) / n;
    m.accuracy = static_cast<double>(correct) / n;
  }
  for (std::size_t c = 0; c < C; ++c) {
    if (class_terms[c].empty()) {
      m.ce_per_class.emplace_back();
    } else {
      m.ce_per_class.emplace_back(sorted_sum(class_terms[c]) / static_cast<double>(class_terms[c].size()));
    }
  }
  if (!eta_errors.empty()) m.eta_mae = sorted_sum(eta_errors) / static_cast<double>(eta_errors.size());
  return m;
}

Json metrics_to_json(const Metrics& m) {
  Json per_class = Json::array();
  for (const auto& v : m.ce_per_class) per_class.push_back(v ? Json(*v) : Json(nullptr));
  return Json{{"ce", m.ce},
              {"ce_per_class", std::move(per_class)},
              {"accuracy", m.accuracy},
              {"confusion", m.confusion},
              {"eta_mae", m.eta_mae ? Json(*m.eta_mae) : Json(nullptr)},
              {"labeled_edges", m.labeled_edges},
              {"labeled_segments", m.labeled_segments}};
}

Json predictions_to_json(std::span<const SamplePrediction> predictions) {
  Json samples = Json::array();
  for (const SamplePrediction& p : predictions) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < p.probs.rows; ++r) {
      auto row = p.probs.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    samples.push_back({{"t", p.t},
                       {"edge_probs", std::move(rows)},
                       {"segment_etas", p.etas ? Json(*p.etas) : Json(nullptr)}});
  }
  return Json{{"samples", std::move(samples)}};
}

std::vector<SamplePrediction> predictions_from_json(const Json& json) {
  std::vector<SamplePrediction> out;
  try {
    for (const Json& js : json.at("samples")) {
      SamplePrediction p;
      p.t = js.at("t").get<std::int64_t>();
      const Json& rows = js.at("edge_probs");
      const std::size_t cols = rows.empty() ? 0 : rows[0].size();
      p.probs = Tensor(rows.size(), cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) fail(ErrorKind::kParse, "predictions: ragged edge_probs");
        for (std::size_t c = 0; c < cols; ++c) p.probs.at(r, c) = rows[r][c].get<double>();
      }
      const Json& etas = js.at("segment_etas");
      if (!etas.is_null()) p.etas = etas.get<std::vector<double>>();
      out.push_back(std::move(p));
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::kParse, std::string("predictions: ") + e.what());
  }
  return out;
}

Predictor::Predictor(const Checkpoint& ckpt)
    : model_(train_config_from_json(ckpt.config).model), params_(ckpt.params) {
  features_ = train_config_from_json(ckpt.config).features;
  features_.count_scale = ckpt.norm.count_scale;
  eta_scale_ = ckpt.norm.eta_scale;
}

SamplePrediction Predictor::predict(const supergraph::ExtendedGraph& graph,
                                    const Sample& sample) const {
  if (graph.approach() != model_.config().approach) {
    fail(ErrorKind::kValidation, "checkpoint was trained on approach " +
                                     supergraph::approach_name(model_.config().approach) +
                                     ", input graph uses " +
                                     supergraph::approach_name(graph.approach()));
  }
  const nn::GraphInputs inputs = nn::GraphInputs::from(graph);
  model_.check_compatible(inputs);
  const Tensor node = features::extended_features(
      graph, features::node_features(graph.base(), sample, features_));
  const Tensor edge = features::edge_features(graph.base(), features_);
  nn::Tape tape(static_cast<const ParameterStore*>(&params_));
  const nn::ForwardResult fr = model_.forward(tape, inputs, node, edge);
  SamplePrediction out;
  out.t = sample.t;
  out.probs = softmax_rows(tape.value(fr.logits));
  if (fr.etas) {
    const Tensor& etas = tape.value(*fr.etas);
    std::vector<double> seconds(etas.data.size());
    for (std::size_t i = 0; i < seconds.size(); ++i) seconds[i] = etas.data[i] * eta_scale_;
    out.etas = std::move(seconds);
  }
  return out;
}

std::vector<SamplePrediction> Predictor::predict_all(const supergraph::ExtendedGraph& graph,
                                                     std::span<const Sample> samples,
                                                     int threads) const {
  std::vector<SamplePrediction> out(samples.size());
  const std::size_t workers =
      std::clamp<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : 1, 1,
                              std::max<std::size_t>(samples.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = predict(graph, samples[i]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < samples.size(); i += workers) out[i] = predict(graph, samples[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace t4c::training
