// include/selfcrit/decoder.h

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

#ifndef SELFCRIT_DECODER_H_
#define SELFCRIT_DECODER_H_

#include <functional>
#include <vector>

#include "selfcrit/alphabet.h"
#include "selfcrit/logmath.h"
#include "selfcrit/tensor.h"

namespace selfcrit {

// One beam entry: a blank-free prefix with its probability mass split by
// whether the generating path currently ends in blank. total() is the
// prefix's log marginal probability so far.
struct BeamHypothesis {
  Transcription prefix;
  double log_p_blank = kLogZero;
  double log_p_nonblank = kLogZero;
  double total() const { return log_add(log_p_blank, log_p_nonblank); }
};

// Additive log-score for extending `prefix` with `label`, applied on the
// transitions that grow the transcription. An empty function scores
// everything 0; that no-op is the only scorer shipped here. External
// rescoring (a language model, say) plugs in through this.
using PrefixScorer = std::function<double(const Transcription& prefix,
                                          int label)>;

// CTC prefix beam search. Keeps at most `width` prefixes per frame, pruned
// by total score with lexicographic tie-break, and returns up to `width`
// hypotheses ranked the same way. When `width` covers every reachable
// prefix the scores are exact marginals; under real pruning they are lower
// bounds (mass entering a pruned prefix is dropped, not redistributed).
std::vector<BeamHypothesis> beam_search(const Matrix& logits, int width,
                                        const Alphabet& alphabet,
                                        const PrefixScorer& scorer = {});

// Test oracle: marginalizes every one of the K^T paths and returns the
// argmax transcription with its log marginal probability. Throws
// BudgetExceededError beyond T <= 6, K <= 4. Ties break lexicographic.
std::pair<Transcription, double> exhaustive_decode(const Matrix& logits,
                                                   const Alphabet& alphabet);

}  // namespace selfcrit

#endif  // SELFCRIT_DECODER_H_
