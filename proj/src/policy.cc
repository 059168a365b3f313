// src/policy.cc

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

#include "selfcrit/policy.h"

#include "selfcrit/error.h"
#include "selfcrit/metrics.h"

namespace selfcrit {

PolicyEstimate policy_estimate_for_sample(const Matrix& logits,
                                          const Transcription& ref,
                                          const Alphabet& alphabet,
                                          const SampleDraw& sample,
                                          bool use_scst) {
  PolicyEstimate est;
  est.sample = sample;
  est.reward_sample = reward(sample.transcription, ref);
  if (use_scst) {
    est.reward_baseline = reward(greedy_decode(logits), ref);
  }
  double weight = est.reward_sample - est.reward_baseline;
  if (weight == 0.0) {
    // Zero weight must yield a bit-exact zero update; skipping the CTC pass
    // also avoids evaluating -log P for samples we will not move toward.
    est.loss_estimate = 0.0;
    est.grad = Matrix(logits.rows, logits.cols);
    return est;
  }
  // A sampled path always collapses to a transcription it can realize, so
  // the sample is feasible for its own frame count by construction.
  LossGrad nll = ctc_grad(logits, sample.transcription, alphabet);
  est.loss_estimate = weight * nll.loss;
  est.grad = Matrix(logits.rows, logits.cols);
  for (int t = 0; t < logits.rows; ++t) {
    for (int k = 0; k < logits.cols; ++k) {
      est.grad.at(t, k) = weight * nll.grad.at(t, k);
    }
  }
  return est;
}

PolicyEstimate reinforce_grad(const Matrix& logits, const Transcription& ref,
                              const Alphabet& alphabet, uint64_t seed) {
  SampleDraw draw = sample_path(logits, seed);
  return policy_estimate_for_sample(logits, ref, alphabet, draw,
                                    /*use_scst=*/false);
}

PolicyEstimate scst_grad(const Matrix& logits, const Transcription& ref,
                         const Alphabet& alphabet, uint64_t seed) {
  SampleDraw draw = sample_path(logits, seed);
  return policy_estimate_for_sample(logits, ref, alphabet, draw,
                                    /*use_scst=*/true);
}

LossGrad mixed_loss(const Matrix& logits, const Transcription& ref,
                    const Alphabet& alphabet, const MixedLossConfig& cfg,
                    uint64_t seed) {
  return mixed_loss_detail(logits, ref, alphabet, cfg, seed).total;
}

MixedLossDetail mixed_loss_detail(const Matrix& logits,
                                  const Transcription& ref,
                                  const Alphabet& alphabet,
                                  const MixedLossConfig& cfg, uint64_t seed) {
  MixedLossDetail out;
  LossGrad ml = ctc_grad(logits, ref, alphabet);
  out.ctc_loss = ml.loss;
  if (cfg.lambda == 0.0) {
    out.total = std::move(ml);
    return out;
  }
  out.policy_active = true;
  out.policy = cfg.use_scst ? scst_grad(logits, ref, alphabet, seed)
                            : reinforce_grad(logits, ref, alphabet, seed);
  out.total.loss = ml.loss + cfg.lambda * out.policy.loss_estimate;
  out.total.grad = Matrix(logits.rows, logits.cols);
  for (int t = 0; t < logits.rows; ++t) {
    for (int k = 0; k < logits.cols; ++k) {
      out.total.grad.at(t, k) =
          ml.grad.at(t, k) + cfg.lambda * out.policy.grad.at(t, k);
    }
  }
  return out;
}

}  // namespace selfcrit
