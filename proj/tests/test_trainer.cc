// tests/test_trainer.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "selfcrit/checkpoint.h"
#include "selfcrit/config.h"
#include "selfcrit/error.h"
#include "selfcrit/sampler.h"
#include "selfcrit/trainer.h"
#include "testutil.h"

using namespace selfcrit;

namespace {

Alphabet two_labels() { return Alphabet({"a", "b"}); }

ModelConfig tiny_model_config() {
  ModelConfig cfg;
  cfg.input_freq = 3;
  cfg.hidden = 4;
  cfg.num_classes = 3;
  return cfg;
}

TrainConfig tiny_train_config() {
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.05;
  cfg.momentum = 0.9;
  cfg.clip_norm = 5.0;
  cfg.weight_decay = 1e-4;
  cfg.lambda_initial = 0.1;
  cfg.lambda_final = 0.5;
  cfg.plateau_patience = 2;
  cfg.epsilon_improve = 1e-3;
  cfg.seed = 7;
  cfg.max_epochs = 2;
  cfg.use_scst = true;
  return cfg;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

bool same_metrics(const EpochMetrics& a, const EpochMetrics& b) {
  return a.epoch == b.epoch && a.train_loss == b.train_loss &&
         a.val_loss == b.val_loss && a.val_wer == b.val_wer && a.lr == b.lr &&
         a.lambda == b.lambda;
}

}  // namespace

TEST_CASE("gradient clipping") {
  std::vector<double> small{0.1, -0.2};
  std::vector<double> copy = small;
  clip_gradients(small, 1.0);
  CHECK(small == copy);  // under the threshold: untouched

  std::vector<double> big{3.0, 4.0};  // norm 5
  clip_gradients(big, 1.0);
  CHECK(std::abs(big[0] - 0.6) < 1e-15);
  CHECK(std::abs(big[1] - 0.8) < 1e-15);
  CHECK(std::abs(global_norm(big) - 1.0) < 1e-12);

  std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(clip_gradients(bad, 1.0), StepAbortError);
  std::vector<double> inf{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(clip_gradients(inf, 1.0), StepAbortError);
}

TEST_CASE("nesterov step follows the hand computed trajectory") {
  // f(theta) = theta^2 / 2, gradient theta; lr 0.1, momentum 0.9, no decay.
  // v1 = -0.1, theta1 = 1 + 0.9 (-0.1) - 0.1 = 0.81
  // v2 = 0.9 (-0.1) - 0.081 = -0.171, theta2 = 0.81 - 0.1539 - 0.081 = 0.5751
  std::vector<double> theta{1.0};
  std::vector<double> v{0.0};
  sgd_nesterov_step(theta, v, {1.0}, 0.1, 0.9, 0.0);
  CHECK(std::abs(theta[0] - 0.81) < 1e-15);
  CHECK(std::abs(v[0] + 0.1) < 1e-15);
  sgd_nesterov_step(theta, v, {theta[0]}, 0.1, 0.9, 0.0);
  CHECK(std::abs(theta[0] - 0.5751) < 1e-15);
  CHECK(std::abs(v[0] + 0.171) < 1e-15);
}

TEST_CASE("momentum zero reduces to plain sgd and decay shrinks weights") {
  std::vector<double> theta{2.0};
  std::vector<double> v{0.0};
  // Zero gradient: only the decay term moves the weight.
  sgd_nesterov_step(theta, v, {0.0}, 0.1, 0.0, 0.5);
  CHECK(std::abs(theta[0] - 1.9) < 1e-15);
  std::vector<double> t2{1.0}, v2{0.0};
  sgd_nesterov_step(t2, v2, {0.25}, 0.2, 0.0, 0.0);
  CHECK(std::abs(t2[0] - 0.95) < 1e-15);
  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(sgd_nesterov_step(t2, v2, {1.0, 2.0}, 0.1, 0.9, 0.0),
                  InvalidInputError);
}

TEST_CASE("plateau schedule halves the rate and switches lambda once") {
  TrainConfig cfg = tiny_train_config();
  cfg.plateau_patience = 2;
  cfg.epsilon_improve = 1e-2;
  TrainState state;
  state.lr = 0.4;
  state.lambda = cfg.lambda_initial;

  plateau_update(state, cfg, 1.0);  // anything beats +inf
  CHECK(state.best_val == 1.0);
  CHECK(state.plateau_counter == 0);

  plateau_update(state, cfg, 0.995);  // needs < 0.99: miss 1
  CHECK(state.plateau_counter == 1);
  CHECK(state.lr == 0.4);
  CHECK_FALSE(state.lambda_switched);

  plateau_update(state, cfg, 0.991);  // miss 2: halve, switch
  CHECK(state.plateau_counter == 0);
  CHECK(state.lr == 0.2);
  CHECK(state.lambda == cfg.lambda_final);
  CHECK(state.lambda_switched);
  CHECK(state.best_val == 1.0);  // misses never move the best

  plateau_update(state, cfg, 0.9);  // real improvement resets everything
  CHECK(state.best_val == 0.9);
  CHECK(state.plateau_counter == 0);

  plateau_update(state, cfg, 2.0);
  plateau_update(state, cfg, 2.0);  // second event: halve again, lambda stays
  CHECK(state.lr == 0.1);
  CHECK(state.lambda == cfg.lambda_final);
}

TEST_CASE("improvement threshold is strict") {
  TrainConfig cfg = tiny_train_config();
  cfg.epsilon_improve = 0.1;
  cfg.plateau_patience = 1;
  TrainState state;
  state.lr = 1.0;
  plateau_update(state, cfg, 1.0);
  // Exactly best * (1 - eps) does not count as improvement.
  plateau_update(state, cfg, 0.9);
  CHECK(state.best_val == 1.0);
  CHECK(state.lr == 0.5);
}

TEST_CASE("train config validation") {
  TrainConfig cfg = tiny_train_config();
  CHECK_NOTHROW(validate(cfg));
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidInputError);
  cfg = tiny_train_config();
  cfg.lambda_final = cfg.lambda_initial - 0.05;
  CHECK_THROWS_AS(validate(cfg), InvalidInputError);
  cfg = tiny_train_config();
  cfg.clip_norm = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidInputError);
  cfg = tiny_train_config();
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidInputError);
}

TEST_CASE("evaluate pools edits over the corpus") {
  Alphabet alphabet = two_labels();
  Model model(tiny_model_config());
  model.init_params(3);
  Rng rng(191);
  std::vector<Record> records = testutil::tiny_records(rng, 5, 3, 6, 1, 2, 2);
  EvalMetrics m = evaluate(model, records, alphabet);
  double loss_sum = 0.0;
  int64_t edits = 0, ref_len = 0;
  for (const Record& rec : records) {
    Matrix logits = model.forward(rec.features, nullptr, nullptr);
    loss_sum += -ctc_forward(logits, rec.labels, alphabet);
    edits += edit_distance(greedy_decode(logits), rec.labels).distance();
    ref_len += rec.labels.length();
  }
  CHECK(m.ctc_loss == loss_sum / records.size());
  CHECK(m.wer == static_cast<double>(edits) / ref_len);
}

TEST_CASE("training runs, logs and checkpoints") {
  Alphabet alphabet = two_labels();
  Rng rng(193);
  std::vector<Record> train_data = testutil::tiny_records(rng, 8, 3, 6, 1, 2, 2);
  std::vector<Record> val_data = testutil::tiny_records(rng, 3, 3, 6, 1, 2, 2);
  TrainConfig cfg = tiny_train_config();
  testutil::TempDir dir("train_smoke");
  Model model(tiny_model_config());
  TrainResult result =
      train(model, train_data, val_data, alphabet, cfg, dir.path());

  REQUIRE(result.log.size() == 2);
  CHECK(result.log[0].epoch == 0);
  CHECK(result.log[1].epoch == 1);
  CHECK(result.log[0].lr == cfg.learning_rate);
  CHECK(result.log[0].lambda == cfg.lambda_initial);
  CHECK(result.state.epoch == 2);
  CHECK(result.state.step == 4);  // two batches per epoch
  CHECK(result.state.skipped_steps == 0);
  for (const EpochMetrics& em : result.log) {
    CHECK(std::isfinite(em.train_loss));
    CHECK(std::isfinite(em.val_loss));
    CHECK(em.val_wer >= 0.0);
  }

  // Two metrics lines on disk, json-parsable, keys as documented.
  std::ifstream metrics(dir.path() / "metrics.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["epoch"] == lines);
    CHECK(j.contains("train_loss"));
    CHECK(j.contains("val_loss"));
    CHECK(j.contains("val_wer"));
    CHECK(j.contains("lr"));
    CHECK(j.contains("lambda"));
    ++lines;
  }
  CHECK(lines == 2);

  Checkpoint ckpt = load_checkpoint(dir.path() / "latest.ckpt");
  CHECK(ckpt.state.epoch == 2);
  CHECK(ckpt.params == model.params());
  CHECK(ckpt.state.momentum == result.state.momentum);
  CHECK(ckpt.rng_algorithm == kRngAlgorithmId);

  // An empty out_dir trains without touching the disk.
  Model quiet(tiny_model_config());
  TrainResult r2 = train(quiet, train_data, val_data, alphabet, cfg, "");
  CHECK(r2.log.size() == 2);
  CHECK(quiet.params() == model.params());
}

TEST_CASE("identical runs are bit identical") {
  Alphabet alphabet = two_labels();
  Rng rng(197);
  std::vector<Record> train_data = testutil::tiny_records(rng, 6, 3, 6, 1, 2, 2);
  std::vector<Record> val_data = testutil::tiny_records(rng, 2, 3, 6, 1, 2, 2);
  TrainConfig cfg = tiny_train_config();
  testutil::TempDir da("det_a");
  testutil::TempDir db("det_b");
  Model ma(tiny_model_config());
  Model mb(tiny_model_config());
  TrainResult ra = train(ma, train_data, val_data, alphabet, cfg, da.path());
  TrainResult rb = train(mb, train_data, val_data, alphabet, cfg, db.path());
  CHECK(ma.params() == mb.params());
  REQUIRE(ra.log.size() == rb.log.size());
  for (size_t i = 0; i < ra.log.size(); ++i) {
    CHECK(same_metrics(ra.log[i], rb.log[i]));
  }
  CHECK(file_bytes(da.path() / "metrics.jsonl") ==
        file_bytes(db.path() / "metrics.jsonl"));
  CHECK(file_bytes(da.path() / "latest.ckpt") ==
        file_bytes(db.path() / "latest.ckpt"));
}

TEST_CASE("checkpoint resume replays the uninterrupted run") {
  Alphabet alphabet = two_labels();
  Rng rng(199);
  std::vector<Record> train_data = testutil::tiny_records(rng, 6, 3, 6, 1, 2, 2);
  std::vector<Record> val_data = testutil::tiny_records(rng, 2, 3, 6, 1, 2, 2);
  TrainConfig full = tiny_train_config();
  full.max_epochs = 4;

  testutil::TempDir da("resume_a");
  Model ma(tiny_model_config());
  TrainResult ra = train(ma, train_data, val_data, alphabet, full, da.path());

  // Simulate a run killed after two epochs: an interrupted four-epoch run
  // leaves a checkpoint whose config says four epochs and whose state says
  // two. The first two epochs do not depend on max_epochs, so training a
  // two-epoch run and restamping the horizon reconstructs that file's
  // content exactly.
  TrainConfig half = full;
  half.max_epochs = 2;
  testutil::TempDir db("resume_b");
  Model mb(tiny_model_config());
  train(mb, train_data, val_data, alphabet, half, db.path());
  Checkpoint mid = load_checkpoint(db.path() / "latest.ckpt");
  CHECK(mid.state.epoch == 2);
  mid.train.max_epochs = 4;

  testutil::TempDir dc("resume_c");
  Model mc(tiny_model_config());
  TrainResult rc =
      train(mc, train_data, val_data, alphabet, full, dc.path(), &mid);

  CHECK(mc.params() == ma.params());
  CHECK(rc.state.step == ra.state.step);
  CHECK(rc.state.best_val == ra.state.best_val);
  CHECK(rc.state.lr == ra.state.lr);
  CHECK(rc.state.lambda == ra.state.lambda);
  CHECK(rc.state.momentum == ra.state.momentum);
  REQUIRE(rc.log.size() == 2);
  CHECK(same_metrics(rc.log[0], ra.log[2]));
  CHECK(same_metrics(rc.log[1], ra.log[3]));
  // The final checkpoints of both runs are byte identical.
  CHECK(file_bytes(dc.path() / "latest.ckpt") ==
        file_bytes(da.path() / "latest.ckpt"));

  // A resume under a different config is refused.
  TrainConfig other = full;
  other.learning_rate *= 2.0;
  Model md(tiny_model_config());
  CHECK_THROWS_AS(
      train(md, train_data, val_data, alphabet, other, "", &mid),
      InvalidInputError);
}

TEST_CASE("infeasible training records are rejected by name") {
  Alphabet alphabet = two_labels();
  Rng rng(211);
  std::vector<Record> train_data = testutil::tiny_records(rng, 3, 3, 6, 1, 2, 2);
  std::vector<Record> val_data = testutil::tiny_records(rng, 2, 3, 6, 1, 2, 2);
  Record bad;
  bad.features = testutil::random_tensor(rng, 3, 3, 1);
  bad.labels = Transcription{{0, 0, 1}};  // needs four frames
  bad.name = "bad_record";
  train_data.push_back(bad);
  Model model(tiny_model_config());
  TrainConfig cfg = tiny_train_config();
  try {
    train(model, train_data, val_data, alphabet, cfg, "");
    FAIL("expected InfeasibleTargetError");
  } catch (const InfeasibleTargetError& e) {
    CHECK(std::string(e.what()).find("bad_record") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip is exact") {
  ModelConfig mc = tiny_model_config();
  mc.conv = {{2, 3, 3, 1, 2, true}};
  mc.dropout_conv = 0.25;
  Model model(mc);
  model.init_params(17);
  Checkpoint ckpt;
  ckpt.model = mc;
  ckpt.train = tiny_train_config();
  ckpt.state.momentum.assign(model.params().size(), 0.0);
  ckpt.state.momentum[0] = -3.5e-7;
  ckpt.state.lr = 0.025;
  ckpt.state.lambda = 0.1;
  ckpt.state.lambda_switched = true;
  ckpt.state.epoch = 3;
  ckpt.state.step = 99;
  ckpt.state.best_val = std::numeric_limits<double>::infinity();
  ckpt.state.plateau_counter = 1;
  ckpt.state.skipped_steps = 2;
  ckpt.params = model.params();
  ckpt.rng_algorithm = kRngAlgorithmId;

  testutil::TempDir dir("ckpt");
  save_checkpoint(dir.path() / "a.ckpt", ckpt);
  Checkpoint back = load_checkpoint(dir.path() / "a.ckpt");
  CHECK(back.params == ckpt.params);
  CHECK(back.state.momentum == ckpt.state.momentum);
  CHECK(back.state.lr == ckpt.state.lr);
  CHECK(back.state.lambda == ckpt.state.lambda);
  CHECK(back.state.lambda_switched == ckpt.state.lambda_switched);
  CHECK(back.state.epoch == ckpt.state.epoch);
  CHECK(back.state.step == ckpt.state.step);
  CHECK(back.state.best_val == ckpt.state.best_val);  // +inf survives
  CHECK(back.state.plateau_counter == ckpt.state.plateau_counter);
  CHECK(back.state.skipped_steps == ckpt.state.skipped_steps);
  CHECK(back.rng_algorithm == kRngAlgorithmId);
  CHECK(model_config_to_json(back.model) == model_config_to_json(mc));
  CHECK(train_config_to_json(back.train) ==
        train_config_to_json(ckpt.train));

  // Saving rejects parameter buffers that do not fit the config.
  Checkpoint wrong = ckpt;
  wrong.params.pop_back();
  CHECK_THROWS_AS(save_checkpoint(dir.path() / "b.ckpt", wrong),
                  InvalidInputError);

  // A wrong RNG id fails to load.
  Checkpoint alien = ckpt;
  alien.rng_algorithm = "other-rng-1";
  save_checkpoint(dir.path() / "c.ckpt", alien);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "c.ckpt"), InvalidInputError);

  // Corruption is caught.
  std::string bytes = file_bytes(dir.path() / "a.ckpt");
  bytes[0] = 'X';
  std::ofstream(dir.path() / "d.ckpt", std::ios::binary)
      << bytes;
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "d.ckpt"), InvalidInputError);
  std::ofstream(dir.path() / "e.ckpt", std::ios::binary)
      << file_bytes(dir.path() / "a.ckpt") << '\0';
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "e.ckpt"), InvalidInputError);
}

TEST_CASE("run config json round trip") {
  nlohmann::json flat{{"learning_rate", 0.2},
                      {"max_epochs", 5},
                      {"model_hidden", 16},
                      {"model_input_freq", 6},
                      {"model_conv",
                       nlohmann::json::array(
                           {{4, 3, 3, 1, 1}, {2, 3, 3, 2, 2, 0}})}};
  RunConfig cfg = run_config_from_json(flat);
  CHECK(cfg.train.learning_rate == 0.2);
  CHECK(cfg.train.max_epochs == 5);
  CHECK(cfg.train.batch_size == TrainConfig{}.batch_size);  // default
  CHECK(cfg.model.hidden == 16);
  CHECK(cfg.model.input_freq == 6);
  REQUIRE(cfg.model.conv.size() == 2);
  CHECK(cfg.model.conv[0].channels == 4);
  CHECK(cfg.model.conv[0].residual);  // five elements: residual defaults on
  CHECK(cfg.model.conv[1].stride_f == 2);
  CHECK_FALSE(cfg.model.conv[1].residual);

  RunConfig back = run_config_from_json(run_config_to_json(cfg));
  CHECK(run_config_to_json(back) == run_config_to_json(cfg));

  nlohmann::json unknown = flat;
  unknown["zzz"] = 1;
  CHECK_THROWS_AS(run_config_from_json(unknown), InvalidInputError);
  nlohmann::json unknown_model = flat;
  unknown_model["model_zzz"] = 1;
  CHECK_THROWS_AS(run_config_from_json(unknown_model), InvalidInputError);
  nlohmann::json bad_type = flat;
  bad_type["learning_rate"] = "fast";
  CHECK_THROWS_AS(run_config_from_json(bad_type), InvalidInputError);
  nlohmann::json bad_conv = flat;
  bad_conv["model_conv"] = nlohmann::json::array({{4, 3, 3, 1}});
  CHECK_THROWS_AS(run_config_from_json(bad_conv), InvalidInputError);
}
