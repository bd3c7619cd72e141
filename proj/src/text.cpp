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

#include "ensloss/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "ensloss/errors.hpp"
#include "ensloss/rng.hpp"

namespace ensloss {

void Corpus::validate() const {
  if (class_names.empty()) throw std::invalid_argument("corpus: no class names");
  std::unordered_set<std::string> seen;
  for (const auto& name : class_names) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("corpus: duplicate class name '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].label >= class_names.size()) {
      throw std::invalid_argument("corpus: document " + std::to_string(i) +
                                  " has out-of-range label");
    }
  }
}

Corpus read_corpus(std::istream& in, const std::vector<std::string>* known_classes) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> label_index;
  if (known_classes) {
    corpus.class_names = *known_classes;
    for (std::size_t c = 0; c < known_classes->size(); ++c) label_index[(*known_classes)[c]] = c;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("corpus: line " + std::to_string(line_no) + ": missing TAB separator");
    }
    if (tab == 0) throw DataError("corpus: line " + std::to_string(line_no) + ": empty label");
    std::string label = line.substr(0, tab);
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      if (known_classes) {
        throw DataError("corpus: line " + std::to_string(line_no) + ": unknown label '" + label +
                        "'");
      }
      it = label_index.emplace(label, corpus.class_names.size()).first;
      corpus.class_names.push_back(std::move(label));
    }
    corpus.documents.push_back({it->second, line.substr(tab + 1)});
  }
  return corpus;
}

Corpus read_corpus_file(const std::filesystem::path& path,
                        const std::vector<std::string>* known_classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("corpus: cannot open '" + path.string() + "'");
  return read_corpus(in, known_classes);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents) {
    out << corpus.class_names.at(doc.label) << '\t' << doc.text << '\n';
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if ((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')) {
      current.push_back(static_cast<char>(u | 0x20));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second) {
      throw std::invalid_argument("vocabulary: duplicate term '" + terms_[i] + "'");
    }
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_size,
                            std::size_t min_doc_freq) {
  if (corpus.documents.empty()) throw DataError("vocabulary: empty corpus");
  struct Stats {
    std::size_t total = 0;
    std::size_t docs = 0;
    std::size_t last_doc = SIZE_MAX;
  };
  std::unordered_map<std::string, Stats> stats;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    for (auto& tok : tokenize(corpus.documents[d].text)) {
      auto& s = stats[std::move(tok)];
      ++s.total;
      if (s.last_doc != d) {
        ++s.docs;
        s.last_doc = d;
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [term, s] : stats) {
    if (s.docs >= min_doc_freq) ranked.emplace_back(term, s.total);
  }
  if (ranked.empty()) {
    throw DataError("vocabulary: no term reaches document frequency " +
                    std::to_string(min_doc_freq));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> terms;
  terms.reserve(ranked.size());
  for (auto& r : ranked) terms.push_back(std::move(r.first));
  return Vocabulary(std::move(terms));
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& t : vocab.terms()) out << t << '\n';
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> terms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) throw DataError("vocabulary: empty term at line " + std::to_string(line_no));
    terms.push_back(line);
  }
  try {
    return Vocabulary(std::move(terms));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

SparseFeatureVector vectorize(const Vocabulary& vocab, std::string_view text) {
  std::vector<std::uint32_t> hits;
  for (const auto& tok : tokenize(text)) {
    if (auto idx = vocab.index_of(tok)) hits.push_back(*idx);
  }
  SparseFeatureVector x;
  if (hits.empty()) return x;
  std::sort(hits.begin(), hits.end());
  const double total = static_cast<double>(hits.size());
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    x.indices.push_back(hits[i]);
    x.values.push_back(static_cast<double>(j - i) / total);
    i = j;
  }
  return x;
}

CorpusSplit split(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  if (corpus.documents.size() < 2) throw DataError("split: need at least two documents");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split: test fraction must lie in (0, 1)");
  }
  const std::size_t total = corpus.documents.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> per_class(corpus.num_classes(), 0);
  for (const auto& doc : corpus.documents) ++per_class.at(doc.label);
  const bool stratified = std::all_of(per_class.begin(), per_class.end(),
                                      [](std::size_t n) { return n == 0 || n >= 2; });

  // Test quota per class; a single pseudo-class when not stratified.
  std::vector<std::size_t> quota;
  if (stratified) {
    for (std::size_t n : per_class) {
      quota.push_back(static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))));
    }
  } else {
    quota.push_back(static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(total))));
  }

  CorpusSplit out;
  out.train.class_names = corpus.class_names;
  out.test.class_names = corpus.class_names;
  for (std::size_t idx : order) {
    const auto& doc = corpus.documents[idx];
    auto& q = quota[stratified ? doc.label : 0];
    if (q > 0) {
      --q;
      out.test.documents.push_back(doc);
    } else {
      out.train.documents.push_back(doc);
    }
  }
  if (out.train.documents.empty() || out.test.documents.empty()) {
    throw std::invalid_argument("split: test fraction " + std::to_string(test_fraction) +
                                " leaves one side empty");
  }
  return out;
}

}  // namespace ensloss
