// include/selfcrit/checkpoint.h

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

#ifndef SELFCRIT_CHECKPOINT_H_
#define SELFCRIT_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "selfcrit/model.h"
#include "selfcrit/trainer.h"

namespace selfcrit {

// Full training snapshot: model config and parameters, optimizer state,
// schedule position, and the RNG identity. Parameters and momentum are
// stored as raw 64-bit doubles, so save/load round-trips bit for bit.
// Byte layout is documented in docs/formats.md.
struct Checkpoint {
  ModelConfig model;
  TrainConfig train;
  TrainState state;  // momentum buffers included
  std::vector<double> params;
  std::string rng_algorithm;  // must equal kRngAlgorithmId to load
};

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt);

// Validates the magic, the RNG algorithm id, and every parameter slice
// shape against a model rebuilt from the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace selfcrit

#endif  // SELFCRIT_CHECKPOINT_H_
