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

#include <doctest.h>

#include <stdexcept>

#include "ensloss/noise.hpp"

using namespace ensloss;

namespace {

Corpus labeled(std::size_t n, std::size_t classes) {
  Corpus c;
  for (std::size_t k = 0; k < classes; ++k) c.class_names.push_back("c" + std::to_string(k));
  for (std::size_t i = 0; i < n; ++i) c.documents.push_back({i % classes, "doc " + std::to_string(i)});
  return c;
}

}  // namespace

TEST_CASE("rate 0 is the identity") {
  const auto c = labeled(40, 3);
  const auto out = inject(c, {0.0, 7});
  CHECK(out.corpus == c);
  CHECK(out.flipped.empty());
}

TEST_CASE("rate 0.3 on 100 documents flips exactly 30, all changed") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::size_t classes : {2, 3, 5}) {
      const auto c = labeled(100, classes);
      const auto out = inject(c, {0.3, seed});
      REQUIRE(out.flipped.size() == 30);
      for (std::size_t i = 1; i < out.flipped.size(); ++i) CHECK(out.flipped[i] > out.flipped[i - 1]);
      std::size_t k = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const bool was_flipped = k < out.flipped.size() && out.flipped[k] == i;
        if (was_flipped) {
          ++k;
          CHECK(out.corpus.documents[i].label != c.documents[i].label);
          CHECK(out.corpus.documents[i].label < classes);
        } else {
          CHECK(out.corpus.documents[i] == c.documents[i]);
        }
        CHECK(out.corpus.documents[i].text == c.documents[i].text);
      }
      const auto again = inject(c, {0.3, seed});
      CHECK(again.corpus == out.corpus);
      CHECK(again.flipped == out.flipped);
    }
  }
}

TEST_CASE("different seeds choose different documents") {
  const auto c = labeled(100, 2);
  CHECK(inject(c, {0.3, 1}).flipped != inject(c, {0.3, 2}).flipped);
}

TEST_CASE("replacement labels cover every other class") {
  const auto c = labeled(3000, 4);
  const auto out = inject(c, {1.0, 3});
  std::size_t counts[4][4] = {};
  for (std::size_t i = 0; i < c.size(); ++i) ++counts[c.documents[i].label][out.corpus.documents[i].label];
  for (std::size_t a = 0; a < 4; ++a) {
    CHECK(counts[a][a] == 0);
    for (std::size_t b = 0; b < 4; ++b) {
      if (a != b) CHECK(counts[a][b] > 150);
    }
  }
}

TEST_CASE("rounding of the flip count") {
  CHECK(inject(labeled(7, 2), {0.5, 1}).flipped.size() == 4);
  CHECK(inject(labeled(10, 2), {0.04, 1}).flipped.size() == 0);
  CHECK(inject(labeled(10, 2), {1.0, 1}).flipped.size() == 10);
}

TEST_CASE("noise errors") {
  CHECK_THROWS_AS(inject(labeled(10, 1), {0.3, 1}), std::invalid_argument);
  CHECK_NOTHROW(inject(labeled(10, 1), {0.0, 1}));
  CHECK_THROWS_AS(inject(labeled(10, 2), {-0.1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(inject(labeled(10, 2), {1.5, 1}), std::invalid_argument);
}
