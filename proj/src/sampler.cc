// src/sampler.cc

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

#include "selfcrit/sampler.h"

#include <cmath>
#include <cstdio>

#include "selfcrit/ctc.h"
#include "selfcrit/error.h"
#include "selfcrit/rng.h"

namespace selfcrit {

SampleDraw sample_path(const Matrix& logits, uint64_t seed) {
  if (!logits.all_finite()) {
    throw InvalidInputError("sample_path: non-finite logits");
  }
  const Matrix lp = log_softmax(logits);
  Rng rng(seed);

  SampleDraw draw;
  draw.path.elements.resize(lp.rows);
  for (int t = 0; t < lp.rows; ++t) {
    const double u = rng.uniform01();
    // Inverse-CDF walk over the frame's distribution. The final class
    // absorbs any rounding slack, so the walk always lands.
    double cum = 0.0;
    int picked = lp.cols - 1;
    for (int k = 0; k < lp.cols; ++k) {
      cum += std::exp(lp.at(t, k));
      if (u < cum) {
        picked = k;
        break;
      }
    }
    draw.path.elements[t] = picked;
  }
  draw.transcription = collapse_classes(draw.path.elements);
  char tag[64];
  std::snprintf(tag, sizeof(tag), "%s:seed=0x%016llx", kRngAlgorithmId,
                static_cast<unsigned long long>(seed));
  draw.rng_state_tag = tag;
  return draw;
}

Transcription greedy_decode(const Matrix& logits) {
  if (!logits.all_finite()) {
    throw InvalidInputError("greedy_decode: non-finite logits");
  }
  std::vector<int> best_path(logits.rows);
  for (int t = 0; t < logits.rows; ++t) {
    int best = 0;
    for (int k = 1; k < logits.cols; ++k) {
      if (logits.at(t, k) > logits.at(t, best)) best = k;
    }
    best_path[t] = best;
  }
  return collapse_classes(best_path);
}

}  // namespace selfcrit
