// include/selfcrit/sampler.h

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

#ifndef SELFCRIT_SAMPLER_H_
#define SELFCRIT_SAMPLER_H_

#include <cstdint>
#include <string>

#include "selfcrit/alphabet.h"
#include "selfcrit/tensor.h"

namespace selfcrit {

// One draw from the model's output distribution: the raw frame-wise
// alignment and its collapsed transcription. Collapsing a path draw samples
// transcriptions exactly from the sequence posterior, because path
// probabilities partition over the collapse mapping.
struct SampleDraw {
  Path path;
  Transcription transcription;
  // Identifies the generator and seed that produced the draw, for run logs.
  std::string rng_state_tag;
};

// Draws each frame's class independently from that frame's softmax
// distribution. Same seed, same draw, on any platform.
SampleDraw sample_path(const Matrix& logits, uint64_t seed);

// Best-path decoding: per-frame argmax (ties to the lowest class index),
// then collapse.
Transcription greedy_decode(const Matrix& logits);

}  // namespace selfcrit

#endif  // SELFCRIT_SAMPLER_H_
