// src/synthdata.cc

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

#include "selfcrit/synthdata.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "selfcrit/error.h"

namespace selfcrit {

namespace {

using nlohmann::json;

// Split indices feed the per-record seed derivation; fixed forever.
constexpr uint64_t kSplitTrain = 0;
constexpr uint64_t kSplitVal = 1;
constexpr uint64_t kSplitTest = 2;

template <typename T>
void take(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidInputError(std::string("synth spec: bad value for '") + key +
                            "'");
  }
}

const std::set<std::string> kSpecKeys = {
    "alphabet_size",     "label_len_min",        "label_len_max",
    "frames_per_label_min", "frames_per_label_max", "feature_freq",
    "feature_channels",  "noise_sigma",          "train_records",
    "val_records",       "test_records",         "seed"};

std::string record_filename(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d.rec", index);
  return buf;
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.alphabet_size < 2) {
    throw InvalidInputError("synth spec: need at least 2 symbols");
  }
  if (spec.label_len_min < 1 || spec.label_len_max < spec.label_len_min) {
    throw InvalidInputError("synth spec: bad label length range");
  }
  if (spec.frames_per_label_min < 1 ||
      spec.frames_per_label_max < spec.frames_per_label_min) {
    throw InvalidInputError("synth spec: bad frames-per-label range");
  }
  if (spec.feature_freq < 1 || spec.feature_channels < 1) {
    throw InvalidInputError("synth spec: bad feature dimensions");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw InvalidInputError("synth spec: noise_sigma must be >= 0");
  }
  if (spec.train_records < 1 || spec.val_records < 1 ||
      spec.test_records < 1) {
    throw InvalidInputError("synth spec: each split needs at least 1 record");
  }
}

SynthSpec synth_spec_from_json(const json& j) {
  if (!j.is_object()) {
    throw InvalidInputError("synth spec: must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kSpecKeys.count(it.key())) {
      throw InvalidInputError("synth spec: unknown key '" + it.key() + "'");
    }
  }
  SynthSpec spec;
  take(j, "alphabet_size", spec.alphabet_size);
  take(j, "label_len_min", spec.label_len_min);
  take(j, "label_len_max", spec.label_len_max);
  take(j, "frames_per_label_min", spec.frames_per_label_min);
  take(j, "frames_per_label_max", spec.frames_per_label_max);
  take(j, "feature_freq", spec.feature_freq);
  take(j, "feature_channels", spec.feature_channels);
  take(j, "noise_sigma", spec.noise_sigma);
  take(j, "train_records", spec.train_records);
  take(j, "val_records", spec.val_records);
  take(j, "test_records", spec.test_records);
  take(j, "seed", spec.seed);
  validate(spec);
  return spec;
}

json synth_spec_to_json(const SynthSpec& spec) {
  return json{{"alphabet_size", spec.alphabet_size},
              {"label_len_min", spec.label_len_min},
              {"label_len_max", spec.label_len_max},
              {"frames_per_label_min", spec.frames_per_label_min},
              {"frames_per_label_max", spec.frames_per_label_max},
              {"feature_freq", spec.feature_freq},
              {"feature_channels", spec.feature_channels},
              {"noise_sigma", spec.noise_sigma},
              {"train_records", spec.train_records},
              {"val_records", spec.val_records},
              {"test_records", spec.test_records},
              {"seed", spec.seed}};
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw InvalidInputError("synth spec: cannot read " + path.string());
  }
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError("synth spec: parse error in " + path.string() +
                            ": " + e.what());
  }
  return synth_spec_from_json(j);
}

std::vector<std::string> default_symbols(int n) {
  std::vector<std::string> symbols;
  symbols.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (i < 26) {
      symbols.push_back(std::string(1, static_cast<char>('a' + i)));
    } else {
      symbols.push_back("s" + std::to_string(i));
    }
  }
  return symbols;
}

std::vector<std::vector<double>> make_templates(const SynthSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, rngtag::kTemplate));
  int dim = spec.feature_freq * spec.feature_channels;
  std::vector<std::vector<double>> templates(spec.alphabet_size);
  for (auto& tmpl : templates) {
    tmpl.resize(dim);
    double sq = 0.0;
    for (double& v : tmpl) {
      v = rng.normal();
      sq += v * v;
    }
    double norm = std::sqrt(sq);
    if (norm < 1e-12) {
      tmpl.assign(dim, 0.0);
      tmpl[0] = 1.0;
    } else {
      for (double& v : tmpl) v /= norm;
    }
  }
  return templates;
}

std::vector<int> draw_labels(Rng& rng, int alphabet_size, int len_min,
                             int len_max) {
  int len = len_min + rng.uniform_int(len_max - len_min + 1);
  std::vector<int> labels(len);
  for (int i = 0; i < len; ++i) {
    if (i == 0) {
      labels[i] = rng.uniform_int(alphabet_size);
    } else {
      // Uniform over the other symbols: shift past the previous one.
      int v = rng.uniform_int(alphabet_size - 1);
      labels[i] = v >= labels[i - 1] ? v + 1 : v;
    }
  }
  return labels;
}

Record render_record(const SynthSpec& spec,
                     const std::vector<std::vector<double>>& templates,
                     uint64_t record_seed) {
  Rng rng(record_seed);
  std::vector<int> labels = draw_labels(rng, spec.alphabet_size,
                                        spec.label_len_min,
                                        spec.label_len_max);
  int span = spec.frames_per_label_max - spec.frames_per_label_min + 1;
  std::vector<int> durations(labels.size());
  int frames = 0;
  for (int& d : durations) {
    d = spec.frames_per_label_min + rng.uniform_int(span);
    frames += d;
  }

  Record rec;
  rec.labels.elements = labels;
  rec.features = Tensor3(spec.feature_freq, frames, spec.feature_channels);
  int t = 0;
  for (size_t pos = 0; pos < labels.size(); ++pos) {
    const std::vector<double>& tmpl = templates[labels[pos]];
    for (int rep = 0; rep < durations[pos]; ++rep, ++t) {
      for (int i = 0; i < spec.feature_freq; ++i) {
        for (int d = 0; d < spec.feature_channels; ++d) {
          double v = tmpl[i * spec.feature_channels + d];
          if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
          rec.features.at(i, t, d) = v;
        }
      }
    }
  }

  // Per-record scalar standardization; the removed statistics ride along
  // so the raw features stay recoverable.
  double mean = 0.0;
  for (double v : rec.features.data) mean += v;
  mean /= rec.features.data.size();
  double var = 0.0;
  for (double v : rec.features.data) var += (v - mean) * (v - mean);
  var /= rec.features.data.size();
  double sd = std::sqrt(var);
  if (sd < 1e-12) sd = 1.0;
  for (double& v : rec.features.data) v = (v - mean) / sd;
  rec.raw_mean = mean;
  rec.raw_std = sd;
  return rec;
}

void generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  validate(spec);
  for (const char* split : {"train", "val", "test"}) {
    if (std::filesystem::exists(out_dir / split)) {
      throw InvalidInputError("synth: " + (out_dir / split).string() +
                              " already exists; refusing to mix corpora");
    }
  }
  std::filesystem::create_directories(out_dir);

  std::vector<std::vector<double>> templates = make_templates(spec);
  struct Split {
    const char* name;
    uint64_t id;
    int count;
    std::vector<Record> records;
  };
  std::vector<Split> splits = {
      {"train", kSplitTrain, spec.train_records, {}},
      {"val", kSplitVal, spec.val_records, {}},
      {"test", kSplitTest, spec.test_records, {}}};
  for (Split& split : splits) {
    split.records.reserve(split.count);
    for (int i = 0; i < split.count; ++i) {
      split.records.push_back(render_record(
          spec, templates,
          derive_seed(spec.seed, rngtag::kRecord, split.id,
                      static_cast<uint64_t>(i))));
    }
  }

  // Per-feature standardization from training statistics, applied to all
  // splits.
  int dim = spec.feature_freq * spec.feature_channels;
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  int64_t frames = 0;
  for (const Record& rec : splits[0].records) {
    frames += rec.features.n1;
    for (int i = 0; i < rec.features.n0; ++i) {
      for (int t = 0; t < rec.features.n1; ++t) {
        for (int d = 0; d < rec.features.n2; ++d) {
          mean[i * spec.feature_channels + d] += rec.features.at(i, t, d);
        }
      }
    }
  }
  for (double& m : mean) m /= frames;
  for (const Record& rec : splits[0].records) {
    for (int i = 0; i < rec.features.n0; ++i) {
      for (int t = 0; t < rec.features.n1; ++t) {
        for (int d = 0; d < rec.features.n2; ++d) {
          double delta =
              rec.features.at(i, t, d) - mean[i * spec.feature_channels + d];
          sd[i * spec.feature_channels + d] += delta * delta;
        }
      }
    }
  }
  for (double& s : sd) {
    s = std::sqrt(s / frames);
    if (s < 1e-12) s = 1.0;
  }
  for (Split& split : splits) {
    for (Record& rec : split.records) {
      for (int i = 0; i < rec.features.n0; ++i) {
        for (int t = 0; t < rec.features.n1; ++t) {
          for (int d = 0; d < rec.features.n2; ++d) {
            int f = i * spec.feature_channels + d;
            rec.features.at(i, t, d) =
                (rec.features.at(i, t, d) - mean[f]) / sd[f];
          }
        }
      }
    }
  }

  save_alphabet(out_dir / "alphabet.json",
                Alphabet(default_symbols(spec.alphabet_size)));
  json stats{{"freq", spec.feature_freq},
             {"channels", spec.feature_channels},
             {"mean", mean},
             {"std", sd},
             {"spec", synth_spec_to_json(spec)}};
  std::ofstream os(out_dir / "stats.json");
  if (!os) {
    throw InvalidInputError("synth: cannot write stats.json");
  }
  os << stats.dump(2) << "\n";

  for (Split& split : splits) {
    std::filesystem::path dir = out_dir / split.name;
    std::filesystem::create_directories(dir);
    for (int i = 0; i < split.count; ++i) {
      save_record(dir / record_filename(i), split.records[i]);
    }
  }
}

}  // namespace selfcrit
