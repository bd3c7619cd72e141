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
#include <string>

#include "ensloss/text.hpp"

namespace ensloss {

/// Bag-of-words documents drawn from class-conditional unigram
/// distributions. Every class shares a Zipf background over the vocabulary;
/// class c tilts word w by exp(separation * u[c][w]) with u standard normal.
struct SyntheticSpec {
  std::size_t documents = 2000;
  std::size_t vocabulary = 500;
  std::size_t classes = 2;
  std::size_t min_length = 20;
  std::size_t max_length = 60;
  double separation = 0.5;
  std::uint64_t seed = 0;
};

/// Alphabetic word for a vocabulary id ("wa", "wb", ..., "wba", ...).
std::string synthetic_word(std::size_t id);

/// Documents are generated in round-robin class order so classes are
/// balanced; class names are "c0", "c1", ...
Corpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace ensloss
