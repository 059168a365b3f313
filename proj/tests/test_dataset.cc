// tests/test_dataset.cc

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

#include <fstream>

#include "selfcrit/dataset.h"
#include "selfcrit/error.h"
#include "testutil.h"

using namespace selfcrit;

namespace {

Record make_record(Rng& rng) {
  Record rec;
  rec.features = testutil::random_tensor(rng, 4, 6, 2);
  // Exercise exact values that are easy to get wrong in text formats.
  rec.features.data[0] = -0.0;
  rec.features.data[1] = 1e-300;
  rec.labels = Transcription{{0, 2, 1}};
  rec.raw_mean = -3.25;
  rec.raw_std = 0.125;
  return rec;
}

}  // namespace

TEST_CASE("record round trip is bitwise exact") {
  testutil::TempDir dir("record");
  Rng rng(157);
  Record rec = make_record(rng);
  save_record(dir.path() / "000001.rec", rec);
  Record back = load_record(dir.path() / "000001.rec");
  CHECK(back.features.n0 == rec.features.n0);
  CHECK(back.features.n1 == rec.features.n1);
  CHECK(back.features.n2 == rec.features.n2);
  CHECK(back.features.data == rec.features.data);
  CHECK(back.labels == rec.labels);
  CHECK(back.raw_mean == rec.raw_mean);
  CHECK(back.raw_std == rec.raw_std);
  CHECK(back.name == "000001");
}

TEST_CASE("load_split reads records in filename order") {
  testutil::TempDir dir("split");
  Rng rng(163);
  for (const char* name : {"000002.rec", "000000.rec", "000001.rec"}) {
    Record rec = make_record(rng);
    rec.labels = Transcription{{name[5] - '0'}};
    save_record(dir.path() / name, rec);
  }
  // A non-record file in the directory is ignored.
  std::ofstream(dir.path() / "notes.txt") << "ignored";
  std::vector<Record> split = load_split(dir.path());
  REQUIRE(split.size() == 3);
  CHECK(split[0].name == "000000");
  CHECK(split[0].labels == Transcription{{0}});
  CHECK(split[1].labels == Transcription{{1}});
  CHECK(split[2].labels == Transcription{{2}});
}

TEST_CASE("logits round trip is bitwise exact") {
  testutil::TempDir dir("logits");
  Rng rng(167);
  Matrix logits = testutil::random_logits(rng, 9, 4, 13.0);
  logits.data[3] = -1e308;
  save_logits(dir.path() / "a.logits", logits);
  Matrix back = load_logits(dir.path() / "a.logits");
  CHECK(back.rows == logits.rows);
  CHECK(back.cols == logits.cols);
  CHECK(back.data == logits.data);
}

TEST_CASE("corrupt files are rejected") {
  testutil::TempDir dir("corrupt");
  Rng rng(173);
  Record rec = make_record(rng);
  save_record(dir.path() / "a.rec", rec);

  // Truncation.
  std::filesystem::path truncated = dir.path() / "b.rec";
  {
    std::ifstream in(dir.path() / "a.rec", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(truncated, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_record(truncated), InvalidInputError);

  // Wrong magic.
  std::filesystem::path wrong = dir.path() / "c.rec";
  {
    std::ifstream in(dir.path() / "a.rec", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes[0] = 'X';
    std::ofstream out(wrong, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(load_record(wrong), InvalidInputError);

  // Trailing garbage.
  std::filesystem::path padded = dir.path() / "d.rec";
  {
    std::ifstream in(dir.path() / "a.rec", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes.push_back('\0');
    std::ofstream out(padded, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(load_record(padded), InvalidInputError);

  CHECK_THROWS_AS(load_record(dir.path() / "missing.rec"), InvalidInputError);
  // A record file is not a logits file.
  CHECK_THROWS_AS(load_logits(dir.path() / "a.rec"), InvalidInputError);
}

TEST_CASE("corpus layout") {
  testutil::TempDir dir("corpus");
  Rng rng(179);
  save_alphabet(dir.path() / "alphabet.json", Alphabet({"a", "b", "c"}));
  std::filesystem::create_directories(dir.path() / "train");
  std::filesystem::create_directories(dir.path() / "val");
  for (int i = 0; i < 3; ++i) {
    save_record(dir.path() / "train" / (std::to_string(i) + ".rec"),
                make_record(rng));
  }
  save_record(dir.path() / "val" / "0.rec", make_record(rng));
  Corpus corpus = load_corpus(dir.path());
  CHECK(corpus.alphabet.num_labels() == 3);
  CHECK(corpus.train.size() == 3);
  CHECK(corpus.val.size() == 1);
  CHECK(corpus.test.empty());  // missing split directories are fine
}

TEST_CASE("corpus requires an alphabet") {
  testutil::TempDir dir("noalpha");
  std::filesystem::create_directories(dir.path() / "train");
  CHECK_THROWS_AS(load_corpus(dir.path()), InvalidInputError);
}
