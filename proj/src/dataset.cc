// src/dataset.cc

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

#include "selfcrit/dataset.h"

#include <algorithm>
#include <fstream>

#include "selfcrit/binio.h"
#include "selfcrit/error.h"

namespace selfcrit {

namespace {

// Caps a dimension product so a corrupt header cannot drive a huge
// allocation before validation catches up.
constexpr int64_t kMaxElements = int64_t{1} << 27;

void write_magic(std::ostream& os, const char m[4]) { os.write(m, 4); }

void expect_magic(std::istream& is, const char m[4], const char* what) {
  char got[4];
  is.read(got, 4);
  if (!is || !std::equal(got, got + 4, m)) {
    throw InvalidInputError(std::string("dataset: bad magic for ") + what);
  }
}

void expect_eof(std::istream& is, const std::filesystem::path& path) {
  is.peek();
  if (!is.eof()) {
    throw InvalidInputError("dataset: trailing bytes in " + path.string());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw InvalidInputError("dataset: cannot write " + path.string());
  }
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw InvalidInputError("dataset: cannot read " + path.string());
  }
  return is;
}

}  // namespace

static const char kRecordMagic[4] = {'S', 'C', 'R', '1'};
static const char kLogitsMagic[4] = {'S', 'C', 'L', '1'};

void save_record(const std::filesystem::path& path, const Record& record) {
  const Tensor3& x = record.features;
  if (x.n0 < 1 || x.n1 < 1 || x.n2 < 1) {
    throw InvalidInputError("dataset: record features must be non-empty");
  }
  std::ofstream os = open_out(path);
  write_magic(os, kRecordMagic);
  write_u32(os, static_cast<uint32_t>(x.n0));
  write_u32(os, static_cast<uint32_t>(x.n1));
  write_u32(os, static_cast<uint32_t>(x.n2));
  write_u32(os, static_cast<uint32_t>(record.labels.elements.size()));
  write_f64(os, record.raw_mean);
  write_f64(os, record.raw_std);
  for (double v : x.data) write_f64(os, v);
  for (int label : record.labels.elements) {
    if (label < 0) throw InvalidInputError("dataset: negative label");
    write_u32(os, static_cast<uint32_t>(label));
  }
  if (!os) throw InvalidInputError("dataset: write failed " + path.string());
}

Record load_record(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  expect_magic(is, kRecordMagic, "record");
  int64_t f = read_u32(is);
  int64_t t = read_u32(is);
  int64_t d = read_u32(is);
  int64_t l = read_u32(is);
  if (f < 1 || t < 1 || d < 1 || f * t * d > kMaxElements ||
      l > kMaxElements) {
    throw InvalidInputError("dataset: implausible header in " + path.string());
  }
  Record rec;
  rec.raw_mean = read_f64(is);
  rec.raw_std = read_f64(is);
  rec.features = Tensor3(static_cast<int>(f), static_cast<int>(t),
                         static_cast<int>(d));
  for (double& v : rec.features.data) v = read_f64(is);
  rec.labels.elements.resize(static_cast<size_t>(l));
  for (int& label : rec.labels.elements) {
    label = static_cast<int>(read_u32(is));
  }
  expect_eof(is, path);
  rec.name = path.stem().string();
  return rec;
}

std::vector<Record> load_split(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidInputError("dataset: no such split directory " +
                            dir.string());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rec") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Record> records;
  records.reserve(paths.size());
  for (const auto& p : paths) records.push_back(load_record(p));
  return records;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus{load_alphabet(dir / "alphabet.json"), {}, {}, {}};
  if (std::filesystem::is_directory(dir / "train")) {
    corpus.train = load_split(dir / "train");
  }
  if (std::filesystem::is_directory(dir / "val")) {
    corpus.val = load_split(dir / "val");
  }
  if (std::filesystem::is_directory(dir / "test")) {
    corpus.test = load_split(dir / "test");
  }
  return corpus;
}

void save_logits(const std::filesystem::path& path, const Matrix& logits) {
  if (logits.rows < 1 || logits.cols < 1) {
    throw InvalidInputError("dataset: logits must be non-empty");
  }
  std::ofstream os = open_out(path);
  write_magic(os, kLogitsMagic);
  write_u32(os, static_cast<uint32_t>(logits.rows));
  write_u32(os, static_cast<uint32_t>(logits.cols));
  for (double v : logits.data) write_f64(os, v);
  if (!os) throw InvalidInputError("dataset: write failed " + path.string());
}

Matrix load_logits(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  expect_magic(is, kLogitsMagic, "logits");
  int64_t t = read_u32(is);
  int64_t k = read_u32(is);
  if (t < 1 || k < 1 || t * k > kMaxElements) {
    throw InvalidInputError("dataset: implausible header in " + path.string());
  }
  Matrix logits(static_cast<int>(t), static_cast<int>(k));
  for (double& v : logits.data) v = read_f64(is);
  expect_eof(is, path);
  return logits;
}

}  // namespace selfcrit
