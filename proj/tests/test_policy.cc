// tests/test_policy.cc

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

#include <bit>
#include <cmath>
#include <cstdint>

#include "selfcrit/error.h"
#include "selfcrit/sampler.h"
#include "testutil.h"

using namespace selfcrit;

namespace {

bool bitwise_zero(const Matrix& m) {
  for (double v : m.data) {
    if (std::bit_cast<uint64_t>(v) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("estimator expectation equals the exact reward gradient") {
  // Exhaustive expectation over every possible draw; both the plain and the
  // self-critical weighting must be unbiased for the same exact gradient.
  Alphabet a({"a"});
  Rng rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    int frames = 2 + trial % 2;  // 2 or 3
    Matrix logits = testutil::random_logits(rng, frames, a.num_classes());
    Transcription ref = testutil::random_transcription(rng, 1, 0, 2);
    Matrix exact = testutil::exact_neg_expected_reward_grad(logits, ref, a);
    Matrix reinforce =
        testutil::expected_estimator_grad(logits, ref, a, false);
    Matrix scst = testutil::expected_estimator_grad(logits, ref, a, true);
    CHECK(testutil::max_abs_diff(reinforce, exact) < 1e-10);
    CHECK(testutil::max_abs_diff(scst, exact) < 1e-10);
  }
}

TEST_CASE("sampled estimators delegate to the deterministic core") {
  Alphabet a({"a", "b"});
  Rng rng(59);
  Matrix logits = testutil::random_logits(rng, 6, a.num_classes());
  Transcription ref{{0, 1}};
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SampleDraw draw = sample_path(logits, seed);
    PolicyEstimate want =
        policy_estimate_for_sample(logits, ref, a, draw, true);
    PolicyEstimate got = scst_grad(logits, ref, a, seed);
    CHECK(got.sample.path == draw.path);
    CHECK(got.grad.data == want.grad.data);
    CHECK(got.loss_estimate == want.loss_estimate);
    PolicyEstimate rf = reinforce_grad(logits, ref, a, seed);
    CHECK(rf.reward_baseline == 0.0);
    CHECK(rf.reward_sample ==
          policy_estimate_for_sample(logits, ref, a, draw, false).reward_sample);
  }
}

TEST_CASE("zero weight gives a bitwise zero gradient") {
  Alphabet a({"a", "b"});
  Rng rng(61);
  int zero_cases = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Matrix logits = testutil::random_logits(rng, 5, a.num_classes(), 4.0);
    Transcription ref = testutil::random_feasible_ref(rng, 5, 2, 3);
    PolicyEstimate est = scst_grad(logits, ref, a, 9000 + trial);
    if (est.reward_sample == est.reward_baseline) {
      ++zero_cases;
      CHECK(bitwise_zero(est.grad));
      CHECK(est.loss_estimate == 0.0);
    }
  }
  // Peaked logits make the sample hit greedy often; the property must
  // actually have been exercised.
  CHECK(zero_cases > 50);
}

TEST_CASE("scst weight is the reward margin over greedy") {
  Alphabet a({"a", "b"});
  Rng rng(67);
  for (int trial = 0; trial < 60; ++trial) {
    Matrix logits = testutil::random_logits(rng, 5, a.num_classes());
    Transcription ref = testutil::random_feasible_ref(rng, 5, 2, 3);
    PolicyEstimate est = scst_grad(logits, ref, a, 333 + trial);
    CHECK(est.reward_sample == reward(est.sample.transcription, ref));
    CHECK(est.reward_baseline == reward(greedy_decode(logits), ref));
    double w = est.reward_sample - est.reward_baseline;
    if (w != 0.0) {
      // Non-zero weight: the gradient is w times the sample's nll gradient.
      LossGrad nll = ctc_grad(logits, est.sample.transcription, a);
      Matrix scaled(nll.grad.rows, nll.grad.cols);
      for (size_t i = 0; i < scaled.data.size(); ++i) {
        scaled.data[i] = w * nll.grad.data[i];
      }
      CHECK(testutil::max_abs_diff(est.grad, scaled) == 0.0);
      CHECK(est.loss_estimate == w * nll.loss);
    }
  }
}

TEST_CASE("mixed loss with lambda zero is exactly the ctc loss") {
  Alphabet a({"a", "b"});
  Rng rng(71);
  Matrix logits = testutil::random_logits(rng, 6, a.num_classes());
  Transcription ref{{0, 1, 0}};
  LossGrad ml = ctc_grad(logits, ref, a);
  MixedLossConfig cfg;
  cfg.lambda = 0.0;
  LossGrad mixed = mixed_loss(logits, ref, a, cfg, 123);
  CHECK(mixed.loss == ml.loss);
  CHECK(mixed.grad.data == ml.grad.data);
  MixedLossDetail detail = mixed_loss_detail(logits, ref, a, cfg, 123);
  CHECK_FALSE(detail.policy_active);
  CHECK(detail.ctc_loss == ml.loss);
}

TEST_CASE("mixed loss composes the two terms") {
  Alphabet a({"a", "b"});
  Rng rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix logits = testutil::random_logits(rng, 6, a.num_classes());
    Transcription ref = testutil::random_feasible_ref(rng, 6, 2, 4);
    MixedLossConfig cfg;
    cfg.lambda = 0.7;
    cfg.use_scst = true;
    uint64_t seed = 5000 + trial;
    MixedLossDetail detail = mixed_loss_detail(logits, ref, a, cfg, seed);
    CHECK(detail.policy_active);
    LossGrad ml = ctc_grad(logits, ref, a);
    CHECK(detail.ctc_loss == ml.loss);
    CHECK(detail.total.loss ==
          ml.loss + cfg.lambda * detail.policy.loss_estimate);
    for (size_t i = 0; i < ml.grad.data.size(); ++i) {
      CHECK(detail.total.grad.data[i] ==
            ml.grad.data[i] + cfg.lambda * detail.policy.grad.data[i]);
    }
    // The wrapper agrees with the detail call.
    LossGrad plain = mixed_loss(logits, ref, a, cfg, seed);
    CHECK(plain.loss == detail.total.loss);
    CHECK(plain.grad.data == detail.total.grad.data);
  }
}

TEST_CASE("infeasible reference is rejected") {
  Alphabet a({"a"});
  Matrix logits(2, 2);
  MixedLossConfig cfg;
  CHECK_THROWS_AS(mixed_loss(logits, Transcription{{0, 0}}, a, cfg, 1),
                  InfeasibleTargetError);
}

TEST_CASE("empty sample never reaches the ctc gradient") {
  // An all-blank sample collapses to the empty transcription, whose nll
  // gradient exists; the estimator must handle it without special cases.
  Alphabet a({"a"});
  Matrix logits(3, 2);
  for (int t = 0; t < 3; ++t) logits.at(t, 0) = 30.0;  // blank dominates
  Transcription ref{{0}};
  PolicyEstimate est = scst_grad(logits, ref, a, 42);
  CHECK(est.sample.transcription == Transcription{{}});
  // Sample equals greedy here, so the weight is zero.
  CHECK(bitwise_zero(est.grad));
}
