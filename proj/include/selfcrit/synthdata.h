// include/selfcrit/synthdata.h

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

#ifndef SELFCRIT_SYNTHDATA_H_
#define SELFCRIT_SYNTHDATA_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfcrit/dataset.h"
#include "selfcrit/rng.h"

namespace selfcrit {

// Recipe for a synthetic transduction corpus. Labels are drawn without
// adjacent repeats, which (with durations >= 1) makes every record CTC
// feasible at its own frame count by construction. noise_sigma is the
// difficulty knob: 0 is separable, larger values push the baseline into
// the error regime the policy term needs to have headroom.
struct SynthSpec {
  int alphabet_size = 5;  // labels; blank not counted
  int label_len_min = 2;
  int label_len_max = 6;
  int frames_per_label_min = 2;
  int frames_per_label_max = 4;
  int feature_freq = 8;      // F
  int feature_channels = 1;  // D
  double noise_sigma = 0.5;
  int train_records = 512;
  int val_records = 64;
  int test_records = 64;
  uint64_t seed = 1;
};

void validate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);
SynthSpec load_synth_spec(const std::filesystem::path& path);

// "a".."z", then "s26", "s27", ...
std::vector<std::string> default_symbols(int n);

// Per-symbol feature template: an F*D vector of unit l2 norm, Gaussian
// direction, drawn from the spec seed. Index [label][i * D + d].
std::vector<std::vector<double>> make_templates(const SynthSpec& spec);

// Uniform length in [len_min, len_max]; uniform symbols with no adjacent
// repeats. Per-position marginals stay uniform by symmetry.
std::vector<int> draw_labels(Rng& rng, int alphabet_size, int len_min,
                             int len_max);

// One record before corpus-level standardization: rendered templates plus
// noise, then per-record scalar standardization (stats kept in the
// record).
Record render_record(const SynthSpec& spec,
                     const std::vector<std::vector<double>>& templates,
                     uint64_t record_seed);

// Writes alphabet.json, stats.json and the train/ val/ test/ splits.
// Applies per-feature standardization from training-set statistics on top
// of the per-record step. Refuses an out_dir that already holds a split.
void generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace selfcrit

#endif  // SELFCRIT_SYNTHDATA_H_
