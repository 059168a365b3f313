// tests/test_alphabet.cc

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

#include <map>

#include "selfcrit/error.h"
#include "testutil.h"

using namespace selfcrit;

TEST_CASE("class indexing reserves zero for blank") {
  Alphabet a({"x", "y"});
  CHECK(a.num_labels() == 2);
  CHECK(a.num_classes() == 3);
  CHECK(Alphabet::kBlank == 0);
  CHECK(Alphabet::label_to_class(0) == 1);
  CHECK(Alphabet::class_to_label(1) == 0);
  for (int label = 0; label < a.num_labels(); ++label) {
    CHECK(Alphabet::class_to_label(Alphabet::label_to_class(label)) == label);
  }
}

TEST_CASE("alphabet rejects bad symbol lists") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InvalidInputError);
  CHECK_THROWS_AS(Alphabet({"a", ""}), InvalidInputError);
  CHECK_THROWS_AS(Alphabet({}), InvalidInputError);
}

TEST_CASE("collapse merges repeats then removes blanks") {
  Alphabet a({"a", "b"});
  // class 1 = a, class 2 = b.
  CHECK(collapse(Path{{1, 1, 0, 2}}, a) == Transcription{{0, 1}});
  CHECK(collapse(Path{{0, 0, 0}}, a) == Transcription{{}});
  CHECK(collapse(Path{{}}, a) == Transcription{{}});
  // A blank splits a repeat into two emissions.
  CHECK(collapse(Path{{1, 0, 1}}, a) == Transcription{{0, 0}});
  CHECK(collapse(Path{{1, 1, 1}}, a) == Transcription{{0}});
  // Merge happens before blank removal, never across a blank.
  CHECK(collapse(Path{{2, 2, 0, 0, 2, 1}}, a) == Transcription{{1, 1, 0}});
}

TEST_CASE("collapse validates classes, collapse_classes does not") {
  Alphabet a({"a"});
  CHECK_THROWS_AS(collapse(Path{{2}}, a), InvalidInputError);
  CHECK_THROWS_AS(collapse(Path{{-1}}, a), InvalidInputError);
  CHECK(collapse_classes({5, 5, 0}) == Transcription{{4}});
}

TEST_CASE("collapse agrees with collapse_classes on random paths") {
  Alphabet a({"a", "b", "c"});
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    int frames = 1 + rng.uniform_int(8);
    Path p;
    for (int t = 0; t < frames; ++t) {
      p.elements.push_back(rng.uniform_int(a.num_classes()));
    }
    CHECK(collapse(p, a) == collapse_classes(p.elements));
  }
}

TEST_CASE("inverse image size matches direct enumeration") {
  Alphabet a({"a", "b"});
  for (int frames = 1; frames <= 5; ++frames) {
    std::map<Transcription, int64_t> census;
    testutil::enumerate_paths(frames, a.num_classes(),
                              [&](const std::vector<int>& path) {
                                census[collapse_classes(path)] += 1;
                              });
    int64_t total = 0;
    for (const auto& [transcription, count] : census) {
      CHECK(inverse_image_size(transcription, frames, a) == count);
      total += count;
    }
    // The collapse map partitions all K^T paths.
    int64_t paths = 1;
    for (int t = 0; t < frames; ++t) paths *= a.num_classes();
    CHECK(total == paths);
    // Unreachable transcriptions have an empty inverse image.
    Transcription too_long{std::vector<int>(frames + 1, 0)};
    CHECK(inverse_image_size(too_long, frames, a) == 0);
  }
}

TEST_CASE("inverse image size enforces its enumeration budget") {
  Alphabet a({"a", "b", "c", "d"});
  CHECK_THROWS_AS(inverse_image_size(Transcription{{0}}, 30, a),
                  BudgetExceededError);
}

TEST_CASE("alphabet json round trip") {
  testutil::TempDir dir("alphabet");
  Alphabet a({"ah", "b", "zz"});
  save_alphabet(dir.path() / "alphabet.json", a);
  Alphabet b = load_alphabet(dir.path() / "alphabet.json");
  CHECK(b.symbols() == a.symbols());
  CHECK_THROWS_AS(load_alphabet(dir.path() / "missing.json"),
                  InvalidInputError);
}
