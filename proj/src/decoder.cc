// src/decoder.cc

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

#include "selfcrit/decoder.h"

#include <algorithm>
#include <map>
#include <utility>

#include "selfcrit/ctc.h"
#include "selfcrit/error.h"

namespace selfcrit {

namespace {

// (log_p_blank, log_p_nonblank) for one prefix.
struct Mass {
  double pb = kLogZero;
  double pnb = kLogZero;
  double total() const { return log_add(pb, pnb); }
};

using Beam = std::map<std::vector<int>, Mass>;

// Keeps the `width` best entries by total score, lexicographic on ties.
// Zero-mass entries are dropped; they are bookkeeping residue, not
// hypotheses.
Beam prune(const Beam& beam, int width) {
  std::vector<std::pair<const std::vector<int>*, Mass>> entries;
  entries.reserve(beam.size());
  for (const auto& [labels, mass] : beam) {
    if (mass.total() > kLogZero) entries.push_back({&labels, mass});
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) {
              double ta = a.second.total();
              double tb = b.second.total();
              if (ta != tb) return ta > tb;
              return *a.first < *b.first;
            });
  if (static_cast<int>(entries.size()) > width) entries.resize(width);
  Beam kept;
  for (const auto& [labels, mass] : entries) kept[*labels] = mass;
  return kept;
}

}  // namespace

std::vector<BeamHypothesis> beam_search(const Matrix& logits, int width,
                                        const Alphabet& alphabet,
                                        const PrefixScorer& scorer) {
  if (width < 1) {
    throw InvalidInputError("beam_search: width must be >= 1");
  }
  if (logits.rows < 1) {
    throw InvalidInputError("beam_search: need at least one frame");
  }
  if (logits.cols != alphabet.num_classes()) {
    throw InvalidInputError("beam_search: logit width " +
                            std::to_string(logits.cols) +
                            " does not match alphabet classes " +
                            std::to_string(alphabet.num_classes()));
  }
  Matrix lp = log_softmax(logits);

  Beam beam;
  beam[{}] = Mass{0.0, kLogZero};  // empty path counts as blank-ending
  for (int t = 0; t < lp.rows; ++t) {
    Beam next;
    for (const auto& [labels, mass] : beam) {
      double seen = mass.total();
      // Blank keeps the prefix and moves its mass to the blank-ending side.
      Mass& same = next[labels];
      same.pb = log_add(same.pb, seen + lp.at(t, Alphabet::kBlank));
      // Re-emitting the last symbol without an intervening blank merges
      // into the same prefix.
      if (!labels.empty()) {
        int last_class = Alphabet::label_to_class(labels.back());
        same.pnb = log_add(same.pnb, mass.pnb + lp.at(t, last_class));
      }
      // Extensions. Repeating the last symbol only extends from the
      // blank-ending side; anything else extends from all mass.
      for (int label = 0; label < alphabet.num_labels(); ++label) {
        int cls = Alphabet::label_to_class(label);
        double src = (!labels.empty() && label == labels.back()) ? mass.pb
                                                                 : seen;
        if (src == kLogZero) continue;
        double bonus =
            scorer ? scorer(Transcription{labels}, label) : 0.0;
        std::vector<int> grown = labels;
        grown.push_back(label);
        Mass& ext = next[grown];
        ext.pnb = log_add(ext.pnb, src + lp.at(t, cls) + bonus);
      }
    }
    beam = prune(next, width);
  }

  std::vector<BeamHypothesis> ranked;
  ranked.reserve(beam.size());
  for (const auto& [labels, mass] : beam) {
    BeamHypothesis hyp;
    hyp.prefix = Transcription{labels};
    hyp.log_p_blank = mass.pb;
    hyp.log_p_nonblank = mass.pnb;
    ranked.push_back(std::move(hyp));
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const BeamHypothesis& a, const BeamHypothesis& b) {
              double ta = a.total();
              double tb = b.total();
              if (ta != tb) return ta > tb;
              return a.prefix.elements < b.prefix.elements;
            });
  return ranked;
}

std::pair<Transcription, double> exhaustive_decode(const Matrix& logits,
                                                   const Alphabet& alphabet) {
  if (logits.rows < 1) {
    throw InvalidInputError("exhaustive_decode: need at least one frame");
  }
  if (logits.cols != alphabet.num_classes()) {
    throw InvalidInputError("exhaustive_decode: logit width mismatch");
  }
  if (logits.rows > 6 || logits.cols > 4) {
    throw BudgetExceededError("exhaustive_decode: limited to T <= 6, K <= 4");
  }
  Matrix lp = log_softmax(logits);
  int frames = lp.rows;
  int classes = lp.cols;

  std::map<std::vector<int>, double> marginal;
  std::vector<int> path(frames, 0);
  while (true) {
    double score = 0.0;
    for (int t = 0; t < frames; ++t) score += lp.at(t, path[t]);
    Transcription trans = collapse_classes(path);
    auto [it, fresh] = marginal.try_emplace(trans.elements, kLogZero);
    it->second = log_add(it->second, score);

    int pos = frames - 1;
    while (pos >= 0 && path[pos] == classes - 1) path[pos--] = 0;
    if (pos < 0) break;
    ++path[pos];
  }

  // Map order is lexicographic; strict > keeps the first of any tie.
  const std::vector<int>* best_labels = nullptr;
  double best_score = kLogZero;
  for (const auto& [labels, score] : marginal) {
    if (best_labels == nullptr || score > best_score) {
      best_labels = &labels;
      best_score = score;
    }
  }
  return {Transcription{*best_labels}, best_score};
}

}  // namespace selfcrit
