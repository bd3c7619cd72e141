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

#include "ensloss/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ensloss/rng.hpp"

namespace ensloss {

std::string synthetic_word(std::size_t id) {
  std::string suffix;
  do {
    suffix.push_back(static_cast<char>('a' + id % 26));
    id /= 26;
  } while (id > 0);
  std::reverse(suffix.begin(), suffix.end());
  return "w" + suffix;
}

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.classes < 1 || spec.vocabulary < 1 || spec.documents < 1) {
    throw std::invalid_argument("synthetic: documents, vocabulary and classes must be positive");
  }
  if (spec.min_length < 1 || spec.max_length < spec.min_length) {
    throw std::invalid_argument("synthetic: need 1 <= min_length <= max_length");
  }
  Rng rng(spec.seed);

  // Zipf background over a random permutation of the vocabulary.
  std::vector<std::size_t> rank(spec.vocabulary);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(rank));

  std::vector<std::vector<double>> cumulative(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    auto& cdf = cumulative[c];
    cdf.resize(spec.vocabulary);
    double running = 0.0;
    for (std::size_t w = 0; w < spec.vocabulary; ++w) {
      const double background = 1.0 / static_cast<double>(rank[w] + 1);
      running += background * std::exp(spec.separation * rng.normal());
      cdf[w] = running;
    }
  }

  Corpus corpus;
  for (std::size_t c = 0; c < spec.classes; ++c) corpus.class_names.push_back("c" + std::to_string(c));
  corpus.documents.reserve(spec.documents);
  const std::size_t span_len = spec.max_length - spec.min_length + 1;
  for (std::size_t d = 0; d < spec.documents; ++d) {
    const std::size_t label = d % spec.classes;
    const auto& cdf = cumulative[label];
    const std::size_t length = spec.min_length + static_cast<std::size_t>(rng.below(span_len));
    std::string text;
    for (std::size_t t = 0; t < length; ++t) {
      const double u = rng.uniform() * cdf.back();
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto w = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
          it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      if (t) text.push_back(' ');
      text += synthetic_word(w);
    }
    corpus.documents.push_back({label, std::move(text)});
  }
  return corpus;
}

}  // namespace ensloss
