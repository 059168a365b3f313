// include/selfcrit/ctc.h

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

#ifndef SELFCRIT_CTC_H_
#define SELFCRIT_CTC_H_

#include "selfcrit/alphabet.h"
#include "selfcrit/tensor.h"

namespace selfcrit {

// Scalar loss plus its gradient w.r.t. the logits that produced it. The
// currency between loss layers and the model: the model's backward pass
// starts from `grad`.
struct LossGrad {
  double loss = 0.0;
  Matrix grad;
};

// Row-wise log-softmax. Each output row is a log-distribution over classes
// (logsumexp of a row is 0 to machine precision). Throws InvalidInputError
// on non-finite input.
Matrix log_softmax(const Matrix& logits);

// True iff some length-`frames` alignment collapses to `target`:
// frames >= target length + number of adjacent equal-label pairs.
bool ctc_feasible(int frames, const Transcription& target);

// log P(target | logits): forward pass over the blank-interleaved label
// sequence, entirely in log space. Infeasible targets score kLogZero; that
// is a legitimate zero-probability event, not an error. Throws
// InvalidInputError on class-count mismatch or non-finite logits.
double ctc_forward(const Matrix& logits, const Transcription& target,
                   const Alphabet& alphabet);

// Negative log-likelihood and its exact gradient w.r.t. logits, from the
// forward and backward recursions. Throws InfeasibleTargetError when the
// likelihood is exactly zero (the gradient does not exist there).
LossGrad ctc_grad(const Matrix& logits, const Transcription& target,
                  const Alphabet& alphabet);

// Literal marginalization: enumerate every length-T alignment, keep those
// collapsing to `target`, logsumexp their path log-probabilities. Oracle for
// ctc_forward on small instances; throws BudgetExceededError beyond
// T <= 8, classes <= 4.
double ctc_brute_force(const Matrix& logits, const Transcription& target,
                       const Alphabet& alphabet);

}  // namespace selfcrit

#endif  // SELFCRIT_CTC_H_
