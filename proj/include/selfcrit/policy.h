// include/selfcrit/policy.h

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

#ifndef SELFCRIT_POLICY_H_
#define SELFCRIT_POLICY_H_

#include <cstdint>

#include "selfcrit/ctc.h"
#include "selfcrit/sampler.h"

namespace selfcrit {

// One-sample policy-gradient estimate. grad = weight * d(-log P(sample)) /
// d(logits) with weight = reward_sample - reward_baseline; when the weight
// is zero the gradient is the exact zero matrix, not float noise.
//
// loss_estimate is the surrogate -weight * log P(sample | logits). Its
// gradient is the policy gradient, but its value is not the negative
// expected reward; training curves should read the reward columns instead.
struct PolicyEstimate {
  double loss_estimate = 0.0;
  Matrix grad;
  double reward_sample = 0.0;
  double reward_baseline = 0.0;  // 0 for plain REINFORCE
  SampleDraw sample;
};

struct MixedLossConfig {
  double lambda = 0.1;   // policy-term coefficient; 0 means pure likelihood
  bool use_scst = true;  // greedy-decode baseline vs. no baseline
};

// Deterministic core shared by the estimators: scores a given sample draw
// against the reference. Tests drive it with enumerated paths to take exact
// expectations over the sampling distribution.
PolicyEstimate policy_estimate_for_sample(const Matrix& logits,
                                          const Transcription& ref,
                                          const Alphabet& alphabet,
                                          const SampleDraw& sample,
                                          bool use_scst);

// Single-sample REINFORCE: weight = reward of the sampled transcription.
PolicyEstimate reinforce_grad(const Matrix& logits, const Transcription& ref,
                              const Alphabet& alphabet, uint64_t seed);

// Self-critical: weight = sampled reward minus the greedy-decode reward, so
// samples beating the model's own greedy output are reinforced and worse
// ones suppressed.
PolicyEstimate scst_grad(const Matrix& logits, const Transcription& ref,
                         const Alphabet& alphabet, uint64_t seed);

// Likelihood plus lambda times the policy term. With lambda = 0 this is
// exactly the CTC loss (no sample is drawn). Throws InfeasibleTargetError
// when the reference cannot be aligned.
LossGrad mixed_loss(const Matrix& logits, const Transcription& ref,
                    const Alphabet& alphabet, const MixedLossConfig& cfg,
                    uint64_t seed);

// mixed_loss plus the pieces the trainer logs.
struct MixedLossDetail {
  LossGrad total;
  double ctc_loss = 0.0;
  bool policy_active = false;
  PolicyEstimate policy;  // valid only when policy_active
};

MixedLossDetail mixed_loss_detail(const Matrix& logits,
                                  const Transcription& ref,
                                  const Alphabet& alphabet,
                                  const MixedLossConfig& cfg, uint64_t seed);

}  // namespace selfcrit

#endif  // SELFCRIT_POLICY_H_
