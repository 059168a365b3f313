// include/selfcrit/dataset.h

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

#ifndef SELFCRIT_DATASET_H_
#define SELFCRIT_DATASET_H_

#include <filesystem>
#include <string>
#include <vector>

#include "selfcrit/alphabet.h"
#include "selfcrit/tensor.h"

namespace selfcrit {

// One utterance: an F x T x D feature tensor with its reference labels.
// raw_mean / raw_std are the per-record statistics the generator removed;
// keeping them makes the record invertible back to raw features.
// Byte layout is documented in docs/formats.md.
struct Record {
  Tensor3 features;
  Transcription labels;
  double raw_mean = 0.0;
  double raw_std = 1.0;
  std::string name;  // file stem; set on load, not serialized
};

void save_record(const std::filesystem::path& path, const Record& record);
Record load_record(const std::filesystem::path& path);

// Loads every *.rec in the directory in filename order.
std::vector<Record> load_split(const std::filesystem::path& dir);

// A corpus directory: alphabet.json, stats.json, train/ val/ test/.
struct Corpus {
  Alphabet alphabet;
  std::vector<Record> train;
  std::vector<Record> val;
  std::vector<Record> test;
};

Corpus load_corpus(const std::filesystem::path& dir);

// T x K logit matrices for the decode tool.
void save_logits(const std::filesystem::path& path, const Matrix& logits);
Matrix load_logits(const std::filesystem::path& path);

}  // namespace selfcrit

#endif  // SELFCRIT_DATASET_H_
