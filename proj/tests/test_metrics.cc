// tests/test_metrics.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "testutil.h"

using namespace selfcrit;

namespace {

Transcription t(std::vector<int> v) { return Transcription{std::move(v)}; }

// Every sequence of length <= max_len over `symbols` symbols.
std::vector<Transcription> all_sequences(int symbols, int max_len) {
  std::vector<Transcription> out{t({})};
  size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    size_t end = out.size();
    for (size_t i = begin; i < end; ++i) {
      for (int s = 0; s < symbols; ++s) {
        Transcription next = out[i];
        next.elements.push_back(s);
        out.push_back(next);
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace

TEST_CASE("edit distance worked examples") {
  CHECK(edit_distance(t({}), t({})).distance() == 0);
  CHECK(edit_distance(t({0, 1}), t({0, 1})).distance() == 0);

  EditStats sub = edit_distance(t({0, 2}), t({0, 1}));
  CHECK(sub.distance() == 1);
  CHECK(sub.substitutions == 1);

  // Hypothesis missed a reference symbol: a deletion.
  EditStats del = edit_distance(t({0, 1}), t({0, 1, 2}));
  CHECK(del.distance() == 1);
  CHECK(del.deletions == 1);
  CHECK(del.insertions == 0);

  // Spurious hypothesis symbol: an insertion.
  EditStats ins = edit_distance(t({0, 1, 2}), t({0, 1}));
  CHECK(ins.distance() == 1);
  CHECK(ins.insertions == 1);
  CHECK(ins.deletions == 0);

  CHECK(edit_distance(t({3, 3, 3}), t({})).distance() == 3);
  CHECK(edit_distance(t({}), t({3, 3, 3})).distance() == 3);
  // Classic mixed case: one substitution and one deletion.
  CHECK(edit_distance(t({0, 1, 3}), t({0, 2, 3, 4})).distance() == 2);
}

TEST_CASE("edit distance matches the memoized recursive oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    Transcription hyp = testutil::random_transcription(rng, 5, 0, 8);
    Transcription ref = testutil::random_transcription(rng, 5, 0, 8);
    EditStats st = edit_distance(hyp, ref);
    CHECK(st.distance() ==
          testutil::oracle_edit_distance(hyp.elements, ref.elements));
    CHECK(st.ref_len == ref.length());
    // The decomposition must account for the length difference exactly.
    CHECK(hyp.length() == ref.length() - st.deletions + st.insertions);
    CHECK(st.substitutions >= 0);
    CHECK(st.insertions >= 0);
    CHECK(st.deletions >= 0);
  }
}

TEST_CASE("metric axioms hold exhaustively on short binary sequences") {
  std::vector<Transcription> seqs = all_sequences(2, 4);
  CHECK(seqs.size() == 31);
  for (const Transcription& a : seqs) {
    for (const Transcription& b : seqs) {
      int d_ab = edit_distance(a, b).distance();
      CHECK(d_ab >= 0);
      CHECK((d_ab == 0) == (a == b));
      CHECK(d_ab == edit_distance(b, a).distance());
    }
  }
  for (const Transcription& a : seqs) {
    for (const Transcription& b : seqs) {
      int d_ab = edit_distance(a, b).distance();
      for (const Transcription& c : seqs) {
        CHECK(d_ab <=
              edit_distance(a, c).distance() + edit_distance(c, b).distance());
      }
    }
  }
}

TEST_CASE("error rate conventions") {
  CHECK(error_rate(t({}), t({})) == 0.0);
  CHECK(error_rate(t({0, 0}), t({})) == 2.0);
  CHECK(error_rate(t({0}), t({0, 1})) == 0.5);
  // More errors than reference symbols pushes the rate past 1.
  CHECK(error_rate(t({1, 1, 1}), t({0})) == 3.0);
}

TEST_CASE("reward is one minus the clipped error rate") {
  CHECK(reward(t({0, 1}), t({0, 1})) == 1.0);
  CHECK(reward(t({0}), t({0, 1})) == 0.5);
  CHECK(reward(t({1, 1, 1}), t({0})) == 0.0);  // clipped at zero
  CHECK(reward(t({}), t({})) == 1.0);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Transcription hyp = testutil::random_transcription(rng, 3, 0, 6);
    Transcription ref = testutil::random_transcription(rng, 3, 0, 6);
    double r = reward(hyp, ref);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    CHECK(r == 1.0 - std::min(1.0, error_rate(hyp, ref)));
  }
}
