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
#include <vector>

#include "ensloss/text.hpp"

namespace ensloss {

struct NoiseSpec {
  double rate = 0.0;  // fraction of documents whose label is replaced
  std::uint64_t seed = 0;
};

struct NoisyCorpus {
  Corpus corpus;
  std::vector<std::size_t> flipped;  // ascending document indices
};

/// Symmetric label noise. Exactly round(rate * T) documents, chosen uniformly
/// without replacement, receive a label drawn uniformly from the other C - 1
/// classes. Throws std::invalid_argument when rate is outside [0, 1] or when
/// rate > 0 on a corpus with fewer than two classes.
NoisyCorpus inject(const Corpus& corpus, const NoiseSpec& spec);

}  // namespace ensloss
