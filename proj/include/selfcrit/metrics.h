// include/selfcrit/metrics.h

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

#ifndef SELFCRIT_METRICS_H_
#define SELFCRIT_METRICS_H_

#include "selfcrit/alphabet.h"

namespace selfcrit {

// Unit-cost edit distance decomposition. Convention: a deletion is a
// reference symbol the hypothesis missed, an insertion is a spurious
// hypothesis symbol.
struct EditStats {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_len = 0;

  int distance() const { return substitutions + insertions + deletions; }
};

// Levenshtein distance via dynamic programming. The backtrace breaks cost
// ties deterministically (substitution, then deletion, then insertion) so
// the decomposition is reproducible.
EditStats edit_distance(const Transcription& hyp, const Transcription& ref);

// distance / ref_len. Can exceed 1. Empty reference: 0 for an empty
// hypothesis, otherwise hyp length (edits counted against a unit length).
double error_rate(const Transcription& hyp, const Transcription& ref);

// 1 - min(1, error_rate): 1 for an exact match, 0 once the error rate
// saturates. This is the quantity the policy objective maximizes.
double reward(const Transcription& hyp, const Transcription& ref);

}  // namespace selfcrit

#endif  // SELFCRIT_METRICS_H_
