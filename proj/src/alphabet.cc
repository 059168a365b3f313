// src/alphabet.cc

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

#include "selfcrit/alphabet.h"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "selfcrit/error.h"

namespace selfcrit {

Alphabet::Alphabet(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw InvalidInputError("alphabet: empty symbol list");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw InvalidInputError("alphabet: empty symbol string");
    if (!seen.insert(s).second) {
      throw InvalidInputError("alphabet: duplicate symbol '" + s + "'");
    }
  }
}

Transcription collapse(const Path& path, const Alphabet& alphabet) {
  const int num_classes = alphabet.num_classes();
  for (int cls : path.elements) {
    if (cls < 0 || cls >= num_classes) {
      throw InvalidInputError("collapse: class index " + std::to_string(cls) +
                              " outside [0, " + std::to_string(num_classes) +
                              ")");
    }
  }
  return collapse_classes(path.elements);
}

Transcription collapse_classes(const std::vector<int>& classes) {
  Transcription out;
  int prev = -1;
  for (int cls : classes) {
    if (cls != prev && cls != Alphabet::kBlank) {
      out.elements.push_back(Alphabet::class_to_label(cls));
    }
    prev = cls;
  }
  return out;
}

int64_t inverse_image_size(const Transcription& transcription, int frames,
                           const Alphabet& alphabet) {
  if (frames < 1) {
    throw InvalidInputError("inverse_image_size: frames must be >= 1");
  }
  const int num_classes = alphabet.num_classes();
  // K^T enumeration: cap at ~4M paths.
  if (frames * std::log(static_cast<double>(num_classes)) >
      22.0 * std::log(2.0)) {
    throw BudgetExceededError("inverse_image_size: " +
                              std::to_string(num_classes) + "^" +
                              std::to_string(frames) +
                              " paths exceeds the enumeration budget");
  }

  int64_t count = 0;
  std::vector<int> path(frames, 0);
  Path p;
  p.elements = path;
  for (;;) {
    if (collapse(p, alphabet) == transcription) ++count;
    // Odometer over class indices.
    int pos = frames - 1;
    while (pos >= 0 && p.elements[pos] == num_classes - 1) {
      p.elements[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++p.elements[pos];
  }
  return count;
}

void save_alphabet(const std::filesystem::path& file,
                   const Alphabet& alphabet) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : alphabet.symbols()) j.push_back(s);
  std::ofstream out(file);
  if (!out) {
    throw InvalidInputError("save_alphabet: cannot open " + file.string());
  }
  out << j.dump(2) << "\n";
}

Alphabet load_alphabet(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw InvalidInputError("load_alphabet: cannot open " + file.string());
  }
  nlohmann::json j;
  in >> j;
  if (!j.is_array()) {
    throw InvalidInputError("load_alphabet: expected a JSON list of symbols");
  }
  std::vector<std::string> symbols;
  for (const auto& item : j) symbols.push_back(item.get<std::string>());
  return Alphabet(std::move(symbols));
}

}  // namespace selfcrit
