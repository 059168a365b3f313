// include/selfcrit/trainer.h

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

#ifndef SELFCRIT_TRAINER_H_
#define SELFCRIT_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "selfcrit/dataset.h"
#include "selfcrit/model.h"

namespace selfcrit {

struct Checkpoint;

// Optimization recipe knobs. The config file mirrors these field names
// one to one.
struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 0.1;
  double momentum = 0.95;  // Nesterov
  double clip_norm = 1.0;
  double weight_decay = 1e-5;
  double lambda_initial = 0.1;
  double lambda_final = 1.0;
  int plateau_patience = 3;      // epochs without improvement before halving
  double epsilon_improve = 1e-3; // relative improvement that counts
  uint64_t seed = 1;
  int max_epochs = 20;
  bool use_scst = true;  // greedy baseline on the policy term
};

void validate(const TrainConfig& cfg);

// Everything mutable across epochs. Round-trips through a checkpoint
// losslessly; with the same seed, config and data a resumed run replays
// the interrupted one bit for bit.
struct TrainState {
  std::vector<double> momentum;
  double lr = 0.0;
  double lambda = 0.0;
  bool lambda_switched = false;
  int epoch = 0;     // epochs completed
  int64_t step = 0;  // optimizer steps applied
  double best_val = std::numeric_limits<double>::infinity();
  int plateau_counter = 0;
  int skipped_steps = 0;  // aborted on non-finite gradients
};

double global_norm(const std::vector<double>& values);

// Scales grads in place to global l2 norm <= clip_norm. Throws
// StepAbortError on non-finite gradients; the loop skips and counts the
// step.
void clip_gradients(std::vector<double>& grads, double clip_norm);

// v <- mu v - lr (g + wd theta); theta <- theta + mu v - lr (g + wd theta),
// with the updated v in the second line. mu = 0 reduces to plain SGD.
void sgd_nesterov_step(std::vector<double>& params,
                       std::vector<double>& velocity,
                       const std::vector<double>& grads, double lr,
                       double momentum, double weight_decay);

// Plateau bookkeeping after one validation pass. Improvement means
// val_loss < best * (1 - epsilon_improve). `plateau_patience` consecutive
// non-improving epochs halve the lr; the first such event also moves
// lambda to its final value.
void plateau_update(TrainState& state, const TrainConfig& cfg,
                    double val_loss);

// One metrics-log line. Reports the lr and lambda in effect during the
// epoch, before any plateau adjustment it triggered.
struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_wer = 0.0;
  double lr = 0.0;
  double lambda = 0.0;
};

struct EvalMetrics {
  double ctc_loss = 0.0;  // mean per record
  double wer = 0.0;       // corpus level: total edits / total ref symbols
};

// Mean validation CTC loss and greedy corpus WER; dropout in inference
// mode.
EvalMetrics evaluate(const Model& model, const std::vector<Record>& records,
                     const Alphabet& alphabet);

struct TrainResult {
  TrainState state;
  std::vector<EpochMetrics> log;
};

// Runs the full loop: shuffled mini-batches of the mixed objective, batch
// mean, clip, Nesterov step; per epoch a validation pass, a metrics line
// and a checkpoint. `out_dir` empty skips all disk output. `resume`
// non-null continues a checkpointed run; its config must equal `cfg`.
// Infeasible references are rejected up front naming the record.
TrainResult train(Model& model, const std::vector<Record>& train_data,
                  const std::vector<Record>& val_data,
                  const Alphabet& alphabet, const TrainConfig& cfg,
                  const std::filesystem::path& out_dir,
                  const Checkpoint* resume = nullptr);

}  // namespace selfcrit

#endif  // SELFCRIT_TRAINER_H_
