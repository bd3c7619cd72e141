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

#include "ensloss/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ensloss/rng.hpp"

namespace ensloss {

NoisyCorpus inject(const Corpus& corpus, const NoiseSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw std::invalid_argument("noise: rate must lie in [0, 1]");
  }
  NoisyCorpus out{corpus, {}};
  const std::size_t total = corpus.documents.size();
  const auto count =
      static_cast<std::size_t>(std::llround(spec.rate * static_cast<double>(total)));
  if (count == 0) return out;
  const std::size_t classes = corpus.num_classes();
  if (classes < 2) {
    throw std::invalid_argument("noise: a corpus with fewer than two classes cannot be relabeled");
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots form a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(order[i], order[j]);
  }
  out.flipped.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.flipped.begin(), out.flipped.end());

  for (std::size_t idx : out.flipped) {
    auto& label = out.corpus.documents[idx].label;
    const auto draw = static_cast<std::size_t>(rng.below(classes - 1));
    label = draw >= label ? draw + 1 : draw;
  }
  return out;
}

}  // namespace ensloss
