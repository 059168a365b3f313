// include/selfcrit/gradcheck.h

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

#ifndef SELFCRIT_GRADCHECK_H_
#define SELFCRIT_GRADCHECK_H_

#include <cstdint>

#include "selfcrit/model.h"
#include "selfcrit/policy.h"

namespace selfcrit {

// The policy term with its sample and weight pinned at the freeze point.
// The estimator treats both as constants, so this is the function whose
// gradient the estimator actually computes; finite differences over a
// resampling estimator would chase a discontinuous target.
struct FrozenPolicy {
  Transcription sample;
  double weight = 0.0;  // reward(sample) - baseline, at the freeze point
  double lambda = 0.0;
};

// Draws the sample and baseline once from the given logits and pins them.
// lambda = 0 pins an inert policy term.
FrozenPolicy freeze_policy(const Matrix& logits, const Transcription& ref,
                           const Alphabet& alphabet,
                           const MixedLossConfig& cfg, uint64_t seed);

// ctc loss of the reference plus lambda * weight * ctc loss of the pinned
// sample. Throws InfeasibleTargetError when the reference cannot align.
double frozen_mixed_loss(const Matrix& logits, const Transcription& ref,
                         const Alphabet& alphabet, const FrozenPolicy& fp);

Matrix frozen_mixed_grad_logits(const Matrix& logits, const Transcription& ref,
                                const Alphabet& alphabet,
                                const FrozenPolicy& fp);

struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_diff = 0.0;
  int64_t checked = 0;
};

// |a - n| / max(1e-3, |a| + |n|). The floor keeps near-zero entries from
// being judged on finite-difference noise alone.
double rel_err(double analytic, double numeric);

// Central differences over the logits of the plain ctc loss.
GradCheckReport fd_check_ctc(const Matrix& logits, const Transcription& ref,
                             const Alphabet& alphabet, double h = 1e-5);

// Central differences over the logits of the frozen mixed loss.
GradCheckReport fd_check_frozen_logits(const Matrix& logits,
                                       const Transcription& ref,
                                       const Alphabet& alphabet,
                                       const FrozenPolicy& fp,
                                       double h = 1e-5);

// Central differences over every model parameter of the frozen mixed
// objective composed with the forward pass. Parameters are restored
// exactly. Dropout runs in inference mode so the objective is smooth.
GradCheckReport fd_check_model(Model& model, const Tensor3& input,
                               const Transcription& ref,
                               const Alphabet& alphabet, double lambda,
                               bool use_scst, uint64_t sample_seed,
                               double h = 1e-5);

}  // namespace selfcrit

#endif  // SELFCRIT_GRADCHECK_H_
