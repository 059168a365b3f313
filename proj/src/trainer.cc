// src/trainer.cc

// Copyright 2026  The selfcrit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "selfcrit/trainer.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <utility>

#include "json.hpp"
#include "selfcrit/checkpoint.h"
#include "selfcrit/config.h"
#include "selfcrit/ctc.h"
#include "selfcrit/error.h"
#include "selfcrit/metrics.h"
#include "selfcrit/policy.h"
#include "selfcrit/rng.h"
#include "selfcrit/sampler.h"

namespace selfcrit {

namespace {

// std::shuffle's draw sequence is implementation-defined, so the epoch
// order comes from a hand-rolled Fisher-Yates over the fixed RNG.
void shuffle_indices(std::vector<int>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    int j = rng.uniform_int(i + 1);
    std::swap(v[i], v[static_cast<size_t>(j)]);
  }
}

void check_records(const Model& model, const std::vector<Record>& records,
                   const Alphabet& alphabet, const char* split) {
  for (const Record& rec : records) {
    for (int label : rec.labels.elements) {
      if (label < 0 || label >= alphabet.num_labels()) {
        throw InvalidInputError("train: record '" + rec.name + "' (" + split +
                                ") has label " + std::to_string(label) +
                                " outside the alphabet");
      }
    }
    int frames = model.output_frames(rec.features.n1);
    if (!ctc_feasible(frames, rec.labels)) {
      throw InfeasibleTargetError(
          "train: record '" + rec.name + "' (" + split + ") needs more than " +
          std::to_string(frames) + " output frames for " +
          std::to_string(rec.labels.length()) + " labels");
    }
  }
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) {
    throw InvalidInputError("train config: batch_size must be >= 1");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw InvalidInputError("train config: learning_rate must be > 0");
  }
  if (!(cfg.momentum >= 0.0) || cfg.momentum >= 1.0) {
    throw InvalidInputError("train config: momentum must lie in [0, 1)");
  }
  if (!(cfg.clip_norm > 0.0)) {
    throw InvalidInputError("train config: clip_norm must be > 0");
  }
  if (!(cfg.weight_decay >= 0.0)) {
    throw InvalidInputError("train config: weight_decay must be >= 0");
  }
  if (!(cfg.lambda_initial >= 0.0) ||
      !(cfg.lambda_final >= cfg.lambda_initial)) {
    throw InvalidInputError(
        "train config: need 0 <= lambda_initial <= lambda_final");
  }
  if (cfg.plateau_patience < 1) {
    throw InvalidInputError("train config: plateau_patience must be >= 1");
  }
  if (!(cfg.epsilon_improve >= 0.0) || cfg.epsilon_improve >= 1.0) {
    throw InvalidInputError("train config: epsilon_improve must lie in [0, 1)");
  }
  if (cfg.max_epochs < 1) {
    throw InvalidInputError("train config: max_epochs must be >= 1");
  }
}

double global_norm(const std::vector<double>& values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

void clip_gradients(std::vector<double>& grads, double clip_norm) {
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw StepAbortError("clip: non-finite gradient");
    }
  }
  double norm = global_norm(grads);
  if (!std::isfinite(norm)) {
    throw StepAbortError("clip: gradient norm overflow");
  }
  if (norm > clip_norm) {
    double scale = clip_norm / norm;
    for (double& g : grads) g *= scale;
  }
}

void sgd_nesterov_step(std::vector<double>& params,
                       std::vector<double>& velocity,
                       const std::vector<double>& grads, double lr,
                       double momentum, double weight_decay) {
  if (params.size() != velocity.size() || params.size() != grads.size()) {
    throw InvalidInputError("sgd step: size mismatch");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    double g = grads[i] + weight_decay * params[i];
    double v = momentum * velocity[i] - lr * g;
    params[i] += momentum * v - lr * g;
    velocity[i] = v;
  }
}

void plateau_update(TrainState& state, const TrainConfig& cfg,
                    double val_loss) {
  if (val_loss < state.best_val * (1.0 - cfg.epsilon_improve)) {
    state.best_val = val_loss;
    state.plateau_counter = 0;
    return;
  }
  if (++state.plateau_counter >= cfg.plateau_patience) {
    state.lr *= 0.5;
    state.plateau_counter = 0;
    if (!state.lambda_switched) {
      state.lambda = cfg.lambda_final;
      state.lambda_switched = true;
    }
  }
}

EvalMetrics evaluate(const Model& model, const std::vector<Record>& records,
                     const Alphabet& alphabet) {
  if (records.empty()) {
    throw InvalidInputError("evaluate: no records");
  }
  double loss_sum = 0.0;
  int64_t edits = 0;
  int64_t ref_len = 0;
  for (const Record& rec : records) {
    Matrix logits = model.forward(rec.features, nullptr, nullptr);
    loss_sum += -ctc_forward(logits, rec.labels, alphabet);
    Transcription greedy = greedy_decode(logits);
    edits += edit_distance(greedy, rec.labels).distance();
    ref_len += rec.labels.length();
  }
  EvalMetrics m;
  m.ctc_loss = loss_sum / records.size();
  m.wer = ref_len > 0 ? static_cast<double>(edits) / ref_len
                      : (edits > 0 ? static_cast<double>(edits) : 0.0);
  return m;
}

TrainResult train(Model& model, const std::vector<Record>& train_data,
                  const std::vector<Record>& val_data,
                  const Alphabet& alphabet, const TrainConfig& cfg,
                  const std::filesystem::path& out_dir,
                  const Checkpoint* resume) {
  validate(cfg);
  if (train_data.empty() || val_data.empty()) {
    throw InvalidInputError("train: need non-empty train and val splits");
  }
  if (model.config().num_classes != alphabet.num_classes()) {
    throw InvalidInputError("train: model classes do not match the alphabet");
  }
  check_records(model, train_data, alphabet, "train");
  check_records(model, val_data, alphabet, "val");

  TrainResult result;
  TrainState& state = result.state;
  if (resume) {
    if (train_config_to_json(resume->train) != train_config_to_json(cfg)) {
      throw InvalidInputError(
          "train: resume config differs from the checkpoint's");
    }
    if (model_config_to_json(resume->model) !=
        model_config_to_json(model.config())) {
      throw InvalidInputError(
          "train: resume model config differs from the checkpoint's");
    }
    model.params() = resume->params;
    state = resume->state;
  } else {
    model.init_params(cfg.seed);
    state.momentum.assign(model.params().size(), 0.0);
    state.lr = cfg.learning_rate;
    state.lambda = cfg.lambda_initial;
  }

  std::ofstream metrics_out;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    metrics_out.open(out_dir / "metrics.jsonl", std::ios::app);
    if (!metrics_out) {
      throw InvalidInputError("train: cannot write metrics.jsonl");
    }
  }

  int n = static_cast<int>(train_data.size());
  for (int epoch = state.epoch; epoch < cfg.max_epochs; ++epoch) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(cfg.seed, rngtag::kShuffle,
                                static_cast<uint64_t>(epoch)));
    shuffle_indices(order, shuffle_rng);

    double loss_sum = 0.0;
    int counted = 0;
    std::vector<double> grads_sum(model.params().size());
    for (int start = 0; start < n; start += cfg.batch_size) {
      int stop = std::min(n, start + cfg.batch_size);
      int batch = stop - start;
      std::fill(grads_sum.begin(), grads_sum.end(), 0.0);
      double batch_loss = 0.0;
      for (int pos = start; pos < stop; ++pos) {
        int idx = order[static_cast<size_t>(pos)];
        const Record& rec = train_data[static_cast<size_t>(idx)];
        Rng dropout_rng(derive_seed(cfg.seed, rngtag::kDropout,
                                    static_cast<uint64_t>(epoch),
                                    static_cast<uint64_t>(idx)));
        ForwardCache cache;
        Matrix logits = model.forward(rec.features, &cache, &dropout_rng);
        MixedLossConfig mlc{state.lambda, cfg.use_scst};
        MixedLossDetail detail = mixed_loss_detail(
            logits, rec.labels, alphabet, mlc,
            derive_seed(cfg.seed, rngtag::kSample,
                        static_cast<uint64_t>(epoch),
                        static_cast<uint64_t>(idx)));
        std::vector<double> grads = model.backward(cache, detail.total.grad);
        for (size_t i = 0; i < grads.size(); ++i) grads_sum[i] += grads[i];
        batch_loss += detail.total.loss;
      }
      for (double& g : grads_sum) g /= batch;
      try {
        clip_gradients(grads_sum, cfg.clip_norm);
      } catch (const StepAbortError&) {
        ++state.skipped_steps;
        continue;
      }
      sgd_nesterov_step(model.params(), state.momentum, grads_sum, state.lr,
                        cfg.momentum, cfg.weight_decay);
      ++state.step;
      loss_sum += batch_loss;
      counted += batch;
    }

    EvalMetrics vm = evaluate(model, val_data, alphabet);
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = counted > 0 ? loss_sum / counted : 0.0;
    em.val_loss = vm.ctc_loss;
    em.val_wer = vm.wer;
    em.lr = state.lr;          // values in effect during this epoch
    em.lambda = state.lambda;
    result.log.push_back(em);
    if (metrics_out) {
      nlohmann::json line{{"epoch", em.epoch},
                          {"train_loss", em.train_loss},
                          {"val_loss", em.val_loss},
                          {"val_wer", em.val_wer},
                          {"lr", em.lr},
                          {"lambda", em.lambda}};
      metrics_out << line.dump() << "\n";
      metrics_out.flush();
    }

    plateau_update(state, cfg, vm.ctc_loss);
    state.epoch = epoch + 1;
    if (!out_dir.empty()) {
      Checkpoint ckpt;
      ckpt.model = model.config();
      ckpt.train = cfg;
      ckpt.state = state;
      ckpt.params = model.params();
      ckpt.rng_algorithm = kRngAlgorithmId;
      save_checkpoint(out_dir / "latest.ckpt", ckpt);
    }
  }
  return result;
}

}  // namespace selfcrit
