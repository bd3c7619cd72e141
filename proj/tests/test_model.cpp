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

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ensloss/errors.hpp"
#include "ensloss/gradcheck.hpp"
#include "ensloss/loss.hpp"
#include "ensloss/model.hpp"
#include "oracles.hpp"

using namespace ensloss;

namespace {

ModelParams random_params(Rng& rng, std::size_t n, std::size_t c) {
  ModelParams p(n, c);
  for (double& w : p.weights()) w = rng.normal();
  for (double& b : p.bias()) b = rng.normal();
  return p;
}

SparseFeatureVector dense_features(Rng& rng, std::size_t n) {
  SparseFeatureVector x;
  for (std::uint32_t i = 0; i < n; ++i) {
    x.indices.push_back(i);
    x.values.push_back(rng.uniform(0.01, 1.0));
  }
  return x;
}

}  // namespace

TEST_CASE("forward examples") {
  const ModelParams zero(7, 4);
  SparseFeatureVector x{{1, 5}, {0.5, 0.5}};
  const auto p = forward(zero, x);
  for (double v : p.probs) CHECK(v == 0.25);

  ModelParams biased(3, 3, std::vector<double>(9, 1.0), {0.1, -2.0, 3.0});
  const auto empty = forward(biased, SparseFeatureVector{});
  const auto ref = oracle::softmax({0.1, -2.0, 3.0});
  for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(empty.probs[c] - ref[c]) <= 1e-15);
}

TEST_CASE("forward matches a dense matrix product") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.below(20);
    const std::size_t c = 2 + rng.below(5);
    const auto params = random_params(rng, n, c);
    const auto x = dense_features(rng, n);
    std::vector<double> logits(c);
    for (std::size_t k = 0; k < c; ++k) {
      logits[k] = params.bias()[k];
      for (std::size_t i = 0; i < n; ++i) logits[k] += x.values[i] * params.weight(i, k);
    }
    const auto expected = oracle::softmax(logits);
    const auto pred = forward(params, x);
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      CHECK(std::abs(pred.probs[k] - expected[k]) <= 1e-10);
      CHECK(std::abs(pred.logits[k] - logits[k]) <= 1e-10);
      total += pred.probs[k];
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("forward errors") {
  const ModelParams p(3, 2);
  CHECK_THROWS_AS(forward(p, SparseFeatureVector{{3}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(forward(p, SparseFeatureVector{{0}, {INFINITY}}), std::invalid_argument);
  CHECK_THROWS_AS(forward(p, SparseFeatureVector{{0}, {NAN}}), std::invalid_argument);
  CHECK_THROWS_AS(forward(p, SparseFeatureVector{{0, 1}, {1.0}}), std::invalid_argument);
}

TEST_CASE("backward examples") {
  Rng rng(5);
  const auto params = random_params(rng, 4, 3);
  const SparseFeatureVector x{{0, 2}, {0.25, 0.75}};
  const auto pred = forward(params, x);

  const auto zero = backward(params, x, pred, std::vector<double>{0, 0, 0});
  for (double v : zero.row_values) CHECK(v == 0.0);
  for (double v : zero.bias) CHECK(v == 0.0);

  const auto flat = backward(params, x, pred, std::vector<double>{2.5, 2.5, 2.5});
  for (double v : flat.row_values) CHECK(std::abs(v) <= 1e-15);
  for (double v : flat.bias) CHECK(std::abs(v) <= 1e-15);

  CHECK(flat.rows == std::vector<std::uint32_t>{0, 2});
  CHECK_THROWS_AS(backward(params, x, pred, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("backward matches finite differences of loss after forward") {
  Rng rng(99);
  const LossSpec losses[] = {{LossKind::Square}, {LossKind::Correntropy, 1.0},
                             {LossKind::CrossEntropyMargin}, {LossKind::Hinge}};
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.below(5);
    const std::size_t c = 2 + rng.below(3);
    const auto params = random_params(rng, n, c);
    const auto x = dense_features(rng, n);
    const auto y = oracle::one_hot(rng.below(c), c);
    const auto& spec = losses[rng.below(4)];

    const auto pred = forward(params, x);
    const auto g = backward(params, x, pred, loss_grad_yhat(spec, y, pred.probs));

    std::vector<double> point(params.weights().begin(), params.weights().end());
    point.insert(point.end(), params.bias().begin(), params.bias().end());
    const auto numeric = fd_gradient(
        [&](std::span<const double> p) {
          ModelParams probe(n, c, {p.begin(), p.begin() + n * c}, {p.begin() + n * c, p.end()});
          return loss_value(spec, y, forward(probe, x).probs);
        },
        point);
    std::vector<double> analytic(n * c, 0.0);
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      for (std::size_t k = 0; k < c; ++k) analytic[g.rows[r] * c + k] = g.row_values[r * c + k];
    }
    analytic.insert(analytic.end(), g.bias.begin(), g.bias.end());
    if (!check(analytic, numeric, 1e-4, 1e-7).pass) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("predict_label examples and tie-breaking") {
  CHECK(predict_label({{}, {0.1, 0.7, 0.2}}) == 1);
  CHECK(predict_label({{}, {0.5, 0.5}}) == 0);
  CHECK(predict_label({{}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}) == 0);
}

TEST_CASE("softmax is shift invariant") {
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> logits(2 + rng.below(6));
    for (double& v : logits) v = 5.0 * rng.normal();
    auto shifted = logits;
    const double c = rng.uniform(-50.0, 50.0);
    for (double& v : shifted) v += c;
    const auto a = softmax(logits);
    const auto b = softmax(shifted);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
  }
  const auto big = softmax(std::vector<double>{1000.0, 1000.0});
  CHECK(big[0] == 0.5);
}

TEST_CASE("predicted label is invariant under monotone transforms of the logits") {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> logits(2 + rng.below(6));
    for (double& v : logits) v = rng.normal();
    const auto base = predict_label({logits, softmax(logits)});
    std::vector<double> t1, t2;
    for (double v : logits) {
      t1.push_back(3.0 * v - 1.0);
      t2.push_back(std::atan(v));
    }
    CHECK(predict_label({t1, softmax(t1)}) == base);
    CHECK(predict_label({t2, softmax(t2)}) == base);
  }
}

TEST_CASE("checkpoint round-trips exactly") {
  Rng rng(31);
  const auto params = random_params(rng, 6, 3);
  std::stringstream buf;
  write_checkpoint(buf, params);
  const auto back = read_checkpoint(buf);
  CHECK(back == params);

  std::stringstream empty_model;
  write_checkpoint(empty_model, ModelParams(0, 2));
  CHECK(read_checkpoint(empty_model) == ModelParams(0, 2));
}

TEST_CASE("checkpoint parse errors") {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return read_checkpoint(in);
  };
  CHECK_THROWS_AS(bad(""), DataError);
  CHECK_THROWS_AS(bad("2\n"), DataError);
  CHECK_THROWS_AS(bad("1 2\n1 2\n"), DataError);
  CHECK_THROWS_AS(bad("1 2\n1 x\n0 0\n"), DataError);
  CHECK_THROWS_AS(bad("1 2\n1 2 3\n0 0\n"), DataError);
  CHECK_THROWS_AS(bad("1 0\n\n\n"), DataError);
  CHECK_NOTHROW(bad("1 2\n1 2\n0.5 -0.5\n"));
}
