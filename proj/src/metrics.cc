// src/metrics.cc

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

#include "selfcrit/metrics.h"

#include <algorithm>
#include <vector>

namespace selfcrit {

EditStats edit_distance(const Transcription& hyp, const Transcription& ref) {
  const int H = hyp.length();
  const int R = ref.length();

  // dist[i][j]: distance between hyp[0..i) and ref[0..j).
  std::vector<std::vector<int>> dist(H + 1, std::vector<int>(R + 1, 0));
  for (int i = 0; i <= H; ++i) dist[i][0] = i;
  for (int j = 0; j <= R; ++j) dist[0][j] = j;
  for (int i = 1; i <= H; ++i) {
    for (int j = 1; j <= R; ++j) {
      const int sub_cost = hyp.elements[i - 1] == ref.elements[j - 1] ? 0 : 1;
      dist[i][j] = std::min({dist[i - 1][j - 1] + sub_cost,
                             dist[i][j - 1] + 1,    // deletion
                             dist[i - 1][j] + 1});  // insertion
    }
  }

  EditStats stats;
  stats.ref_len = R;
  // Backtrace, preferring substitution/match over deletion over insertion
  // when costs tie.
  int i = H, j = R;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const int sub_cost = hyp.elements[i - 1] == ref.elements[j - 1] ? 0 : 1;
      if (dist[i][j] == dist[i - 1][j - 1] + sub_cost) {
        stats.substitutions += sub_cost;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && dist[i][j] == dist[i][j - 1] + 1) {
      ++stats.deletions;
      --j;
      continue;
    }
    ++stats.insertions;
    --i;
  }
  return stats;
}

double error_rate(const Transcription& hyp, const Transcription& ref) {
  if (ref.length() == 0) {
    return hyp.length() == 0 ? 0.0 : static_cast<double>(hyp.length());
  }
  const EditStats stats = edit_distance(hyp, ref);
  return static_cast<double>(stats.distance()) / ref.length();
}

double reward(const Transcription& hyp, const Transcription& ref) {
  return 1.0 - std::min(1.0, error_rate(hyp, ref));
}

}  // namespace selfcrit
