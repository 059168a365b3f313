// include/selfcrit/alphabet.h

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

#ifndef SELFCRIT_ALPHABET_H_
#define SELFCRIT_ALPHABET_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace selfcrit {

// The label set plus the reserved blank. Classes are indexed over the
// augmented alphabet: class 0 is blank, class i+1 is label symbol i. All of
// the math below (collapse, CTC, decoding) assumes exactly this convention.
class Alphabet {
 public:
  static constexpr int kBlank = 0;

  // Symbols must be distinct and non-empty. Symbol identity is never
  // inspected by the math; it only names labels in files and CLI output.
  explicit Alphabet(std::vector<std::string> symbols);

  int num_labels() const { return static_cast<int>(symbols_.size()); }
  int num_classes() const { return num_labels() + 1; }  // |labels| + blank

  const std::string& symbol(int label) const { return symbols_.at(label); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  static int label_to_class(int label) { return label + 1; }
  static int class_to_label(int cls) { return cls - 1; }

 private:
  std::vector<std::string> symbols_;
};

// A length-T frame-level alignment: class indices, blanks included.
struct Path {
  std::vector<int> elements;

  auto operator<=>(const Path&) const = default;
};

// A blank-free label sequence: label indices (0-based into the label set).
struct Transcription {
  std::vector<int> elements;

  int length() const { return static_cast<int>(elements.size()); }
  auto operator<=>(const Transcription&) const = default;
};

// Collapses an alignment to its transcription: merge consecutive repeats,
// then delete blanks. Throws InvalidInputError on out-of-range classes.
Transcription collapse(const Path& path, const Alphabet& alphabet);

// Same collapse over raw class indices, without range validation. For
// callers that produced the classes themselves (sampling, argmax decoding).
Transcription collapse_classes(const std::vector<int>& classes);

// Number of length-T alignments that collapse to `transcription`, by
// exhaustive enumeration. Test-oracle support; throws BudgetExceededError
// when num_classes^T would exceed the enumeration budget.
int64_t inverse_image_size(const Transcription& transcription, int frames,
                           const Alphabet& alphabet);

// JSON list of symbol strings; blank is implicit and never listed.
void save_alphabet(const std::filesystem::path& file, const Alphabet& alphabet);
Alphabet load_alphabet(const std::filesystem::path& file);

}  // namespace selfcrit

#endif  // SELFCRIT_ALPHABET_H_
