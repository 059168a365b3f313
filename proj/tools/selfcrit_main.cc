// tools/selfcrit_main.cc

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

// Command-line front end: synth, train, eval, decode, gradcheck.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfcrit/checkpoint.h"
#include "selfcrit/config.h"
#include "selfcrit/ctc.h"
#include "selfcrit/dataset.h"
#include "selfcrit/decoder.h"
#include "selfcrit/error.h"
#include "selfcrit/gradcheck.h"
#include "selfcrit/model.h"
#include "selfcrit/synthdata.h"
#include "selfcrit/trainer.h"

namespace {

using namespace selfcrit;

std::string render(const Transcription& t, const Alphabet& alphabet) {
  std::string out;
  for (size_t i = 0; i < t.elements.size(); ++i) {
    if (i) out += ' ';
    out += alphabet.symbol(t.elements[i]);
  }
  return out;
}

const std::vector<Record>& pick_split(const Corpus& corpus,
                                      const std::string& split) {
  if (split == "train") return corpus.train;
  if (split == "val") return corpus.val;
  if (split == "test") return corpus.test;
  throw InvalidInputError("unknown split '" + split +
                          "' (want train, val or test)");
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
  SynthSpec spec = load_synth_spec(spec_path);
  generate(spec, out_dir);
  std::printf("wrote corpus to %s (%d/%d/%d records)\n", out_dir.c_str(),
              spec.train_records, spec.val_records, spec.test_records);
  return 0;
}

int run_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, bool seed_set, uint64_t seed,
              const std::string& resume_path) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_set) cfg.train.seed = seed;

  Corpus corpus = load_corpus(data_dir);
  if (corpus.train.empty() || corpus.val.empty()) {
    throw InvalidInputError("train: data dir needs train/ and val/ splits");
  }
  if (cfg.model.num_classes == 0) {
    cfg.model.num_classes = corpus.alphabet.num_classes();
  } else if (cfg.model.num_classes != corpus.alphabet.num_classes()) {
    throw InvalidInputError("train: model_num_classes does not match the "
                            "corpus alphabet");
  }
  const Record& probe = corpus.train.front();
  if (cfg.model.input_freq != probe.features.n0 ||
      cfg.model.input_channels != probe.features.n2) {
    throw InvalidInputError("train: model input shape does not match the "
                            "corpus features");
  }

  Model model(cfg.model);
  Checkpoint resume;
  bool resuming = !resume_path.empty();
  if (resuming) resume = load_checkpoint(resume_path);
  TrainResult result =
      train(model, corpus.train, corpus.val, corpus.alphabet, cfg.train,
            out_dir, resuming ? &resume : nullptr);
  for (const EpochMetrics& em : result.log) {
    std::printf(
        "epoch %d  train_loss %.6f  val_loss %.6f  val_wer %.4f  lr %g  "
        "lambda %g\n",
        em.epoch, em.train_loss, em.val_loss, em.val_wer, em.lr, em.lambda);
  }
  if (result.state.skipped_steps > 0) {
    std::printf("skipped %d steps on non-finite gradients\n",
                result.state.skipped_steps);
  }
  std::printf("done: %d epochs, %lld steps\n", result.state.epoch,
              static_cast<long long>(result.state.step));
  return 0;
}

int run_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& split) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model(ckpt.model);
  model.params() = ckpt.params;
  Corpus corpus = load_corpus(data_dir);
  const std::vector<Record>& records = pick_split(corpus, split);
  if (records.empty()) {
    throw InvalidInputError("eval: split '" + split + "' is empty");
  }
  EvalMetrics m = evaluate(model, records, corpus.alphabet);
  std::printf("%s: %zu records  ctc_loss %.6f  greedy_wer %.4f\n",
              split.c_str(), records.size(), m.ctc_loss, m.wer);
  return 0;
}

void print_nbest(const std::vector<BeamHypothesis>& hyps, int nbest,
                 const Alphabet& alphabet) {
  int shown = 0;
  for (const BeamHypothesis& hyp : hyps) {
    if (shown++ >= nbest) break;
    std::printf("  %.6f  [%s]\n", hyp.total(),
                render(hyp.prefix, alphabet).c_str());
  }
}

int run_decode(const std::string& logits_path, const std::string& alpha_path,
               const std::string& ckpt_path, const std::string& data_dir,
               const std::string& split, int width, int nbest) {
  if (!logits_path.empty()) {
    if (alpha_path.empty()) {
      throw InvalidInputError("decode: --logits needs --alphabet");
    }
    Alphabet alphabet = load_alphabet(alpha_path);
    Matrix logits = load_logits(logits_path);
    print_nbest(beam_search(logits, width, alphabet), nbest, alphabet);
    return 0;
  }
  if (ckpt_path.empty() || data_dir.empty()) {
    throw InvalidInputError("decode: need --logits or --ckpt with --data");
  }
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model(ckpt.model);
  model.params() = ckpt.params;
  Corpus corpus = load_corpus(data_dir);
  for (const Record& rec : pick_split(corpus, split)) {
    Matrix logits = model.forward(rec.features, nullptr, nullptr);
    std::printf("%s  ref [%s]\n", rec.name.c_str(),
                render(rec.labels, corpus.alphabet).c_str());
    print_nbest(beam_search(logits, width, corpus.alphabet), nbest,
                corpus.alphabet);
  }
  return 0;
}

// Random but seeded finite-difference sweeps; exits nonzero past tolerance.
int run_gradcheck(uint64_t seed) {
  Alphabet alphabet({"a", "b", "c"});
  Rng rng(seed);

  double worst_loss_layer = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Matrix logits(6, alphabet.num_classes());
    for (double& v : logits.data) v = 2.0 * rng.normal();
    std::vector<int> labels;
    int len = 1 + rng.uniform_int(3);
    for (int i = 0; i < len; ++i) labels.push_back(rng.uniform_int(3));
    Transcription ref{labels};
    if (!ctc_feasible(logits.rows, ref)) continue;
    GradCheckReport r = fd_check_ctc(logits, ref, alphabet);
    worst_loss_layer = std::max(worst_loss_layer, r.max_rel_err);
    FrozenPolicy fp = freeze_policy(logits, ref, alphabet,
                                    MixedLossConfig{0.7, true},
                                    rng.next_u64());
    r = fd_check_frozen_logits(logits, ref, alphabet, fp);
    worst_loss_layer = std::max(worst_loss_layer, r.max_rel_err);
  }
  std::printf("loss layer  max rel err %.3e  (tolerance 1e-6)\n",
              worst_loss_layer);

  ModelConfig mc;
  mc.input_freq = 5;
  mc.input_channels = 1;
  mc.conv = {{4, 3, 3, 1, 2, true}};
  mc.hidden = 8;
  mc.num_classes = alphabet.num_classes();
  Model model(mc);
  double worst_model = 0.0;
  for (int inst = 0; inst < 3; ++inst) {
    model.init_params(rng.next_u64());
    Tensor3 input(mc.input_freq, 7, 1);
    for (double& v : input.data) v = rng.normal();
    Transcription ref{{rng.uniform_int(3), rng.uniform_int(3)}};
    GradCheckReport r = fd_check_model(model, input, ref, alphabet, 0.5, true,
                                       rng.next_u64());
    worst_model = std::max(worst_model, r.max_rel_err);
  }
  std::printf("full model  max rel err %.3e  (tolerance 1e-5)\n", worst_model);

  bool ok = worst_loss_layer < 1e-6 && worst_model < 1e-5;
  std::printf("%s\n", ok ? "gradcheck passed" : "gradcheck FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTC + self-critical sequence training at desk scale"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--spec", spec_path, "synth spec JSON")->required();
  synth->add_option("--out", out_dir, "output corpus directory")->required();

  std::string config_path, data_dir, resume_path;
  uint64_t seed = 0;
  bool seed_set = false;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", config_path, "run config JSON")
      ->required();
  train_cmd->add_option("--data", data_dir, "corpus directory")->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  train_cmd->add_option("--seed", seed, "override the config seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  train_cmd->add_option("--resume", resume_path, "checkpoint to resume from");

  std::string ckpt_path, split = "test";
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  eval_cmd->add_option("--data", data_dir, "corpus directory")->required();
  eval_cmd->add_option("--split", split, "train, val or test");

  std::string logits_path, alpha_path;
  int width = 100;  // default beam width
  int nbest = 1;
  CLI::App* decode_cmd = app.add_subcommand("decode", "beam-search decode");
  decode_cmd->add_option("--logits", logits_path, "logits file");
  decode_cmd->add_option("--alphabet", alpha_path,
                         "alphabet JSON (with --logits)");
  decode_cmd->add_option("--ckpt", ckpt_path, "checkpoint file");
  decode_cmd->add_option("--data", data_dir, "corpus directory");
  decode_cmd->add_option("--split", split, "train, val or test");
  decode_cmd->add_option("--beam-width", width, "beam width");
  decode_cmd->add_option("--nbest", nbest, "hypotheses to print");

  uint64_t gc_seed = 7;
  CLI::App* gc_cmd =
      app.add_subcommand("gradcheck", "finite-difference gradient check");
  gc_cmd->add_option("--seed", gc_seed, "instance seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(spec_path, out_dir);
    if (*train_cmd) {
      return run_train(config_path, data_dir, out_dir, seed_set, seed,
                       resume_path);
    }
    if (*eval_cmd) return run_eval(ckpt_path, data_dir, split);
    if (*decode_cmd) {
      return run_decode(logits_path, alpha_path, ckpt_path, data_dir, split,
                        width, nbest);
    }
    if (*gc_cmd) return run_gradcheck(gc_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
