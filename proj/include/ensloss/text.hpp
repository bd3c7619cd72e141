// Copyright 2026 The ensloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ensloss/model.hpp"

namespace ensloss {

struct Document {
  std::size_t label = 0;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Labeled documents. Labels index into `class_names`.
struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return documents.size(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  /// Throws std::invalid_argument if class names are empty or duplicated, or
  /// if a label is out of range.
  void validate() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Line format `label<TAB>text`. Labels become class indices in first-seen
/// order unless `known_classes` fixes the mapping, in which case an unknown
/// label is a DataError.
Corpus read_corpus(std::istream& in,
                   const std::vector<std::string>* known_classes = nullptr);
Corpus read_corpus_file(const std::filesystem::path& path,
                        const std::vector<std::string>* known_classes = nullptr);
void write_corpus(std::ostream& out, const Corpus& corpus);

/// Lowercased maximal runs of ASCII letters. Every other byte separates.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws std::invalid_argument on duplicate terms.
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::optional<std::uint32_t> index_of(std::string_view term) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

inline constexpr std::size_t kDefaultMaxVocabulary = 20000;
inline constexpr std::size_t kDefaultMinDocFreq = 2;

/// Terms whose document frequency is at least `min_doc_freq`, ordered by
/// descending total count then lexicographically, truncated to `max_size`.
/// Throws DataError for an empty corpus or when no term survives.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_size = kDefaultMaxVocabulary,
                            std::size_t min_doc_freq = kDefaultMinDocFreq);

void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

/// Relative frequencies of in-vocabulary tokens. Empty when the text has no
/// in-vocabulary token.
SparseFeatureVector vectorize(const Vocabulary& vocab, std::string_view text);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Seeded shuffle then split, stratified by class when every class has at
/// least two documents. Each class contributes round(fraction * n_c) test
/// documents (round(fraction * T) overall when not stratified).
CorpusSplit split(const Corpus& corpus, double test_fraction, std::uint64_t seed);

}  // namespace ensloss
