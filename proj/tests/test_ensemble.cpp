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
#include <stdexcept>
#include <vector>

#include "ensloss/ensemble.hpp"
#include "ensloss/gradcheck.hpp"
#include "oracles.hpp"

using namespace ensloss;

namespace {

const LossSpec kSquare{LossKind::Square};
const LossSpec kHinge{LossKind::Hinge};

std::vector<BatchItem> random_batch(Rng& rng, std::size_t n, std::size_t classes) {
  std::vector<BatchItem> batch;
  for (std::size_t i = 0; i < n; ++i) {
    batch.push_back({oracle::one_hot(rng.below(classes), classes), oracle::random_probs(rng, classes)});
  }
  return batch;
}

// Per-sample ensemble loss rebuilt from the oracle formulas for the default set.
double oracle_default_ensemble(const std::vector<double>& lambdas, const std::vector<double>& y,
                               const std::vector<double>& yhat) {
  std::size_t t = 0;
  while (y[t] != 1.0) ++t;
  const double z = yhat[t];
  return lambdas[0] * lambdas[0] * oracle::correntropy(y, yhat, 1.0) +
         lambdas[1] * lambdas[1] * oracle::hinge(z) + lambdas[2] * lambdas[2] * oracle::ce_margin(z);
}

}  // namespace

TEST_CASE("ensemble loss examples") {
  const std::vector<double> y{1, 0};
  CHECK(ensemble_loss(EnsembleState({1.0}, {kSquare}), y, y) == 0.0);

  const double u = 1.0 / std::sqrt(3.0);
  const EnsembleState hinge3({u, u, u}, {kHinge, kHinge, kHinge});
  CHECK(ensemble_loss(hinge3, std::vector<double>{0, 1}, std::vector<double>{0.6, 0.4}) ==
        doctest::Approx(0.6).epsilon(1e-14));

  const std::vector<double> yhat{0.5, 0.5};
  const double expected = 0.36 * oracle::square(y, yhat) + 0.64 * oracle::hinge(0.5);
  const double got = ensemble_loss(EnsembleState({0.6, 0.8}, {kSquare, kHinge}), y, yhat);
  CHECK(std::abs(got - expected) <= 1e-14);
  CHECK(std::abs(got - 0.5) <= 1e-14);
}

TEST_CASE("penalty examples") {
  const double u = 1.0 / std::sqrt(3.0);
  const auto uniform3 = EnsembleState::uniform({kHinge, kHinge, kHinge});
  CHECK(penalty(uniform3, {0.001, 200}) == 0.0);
  CHECK(penalty(uniform3, {0.5, 7}) == 0.0);
  CHECK(uniform3.lambdas()[0] == u);
  for (std::size_t m = 1; m <= 12; ++m) {
    const auto s = EnsembleState::uniform(std::vector<LossSpec>(m, kHinge));
    CHECK(s.constraint_residual() == 0.0);
    CHECK(penalty(s, {0.001, 200}) == 0.0);
    for (double l : s.lambdas()) CHECK(std::abs(l - 1.0 / std::sqrt(double(m))) <= 1e-15);
  }
  CHECK(penalty(EnsembleState({0, 0, 0}, {kHinge, kHinge, kHinge}), {0.0, 200}) == 200.0);
  CHECK(penalty(EnsembleState({1, 1}, {kHinge, kHinge}), {0.01, 200}) ==
        doctest::Approx(200.01).epsilon(1e-15));
}

TEST_CASE("total objective examples") {
  const std::vector<BatchItem> same{{{1, 0}, {1, 0}}};
  CHECK(total_objective(EnsembleState({1.0}, {kSquare}), {}, same) == 0.0);
  CHECK(total_objective(EnsembleState({0, 0}, {kSquare, kHinge}), {0.0, 200}, same) == 200.0);
  CHECK_THROWS_AS(total_objective(EnsembleState({1.0}, {kSquare}), {}, std::vector<BatchItem>{}),
                  std::invalid_argument);
}

TEST_CASE("total objective equals independent re-summation") {
  Rng rng(314);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> lambdas{rng.normal(), rng.normal(), rng.normal()};
    auto state = EnsembleState::default_ensemble();
    state.set_lambdas(lambdas);
    const PenaltyParams params{0.001, 200};
    const auto batch = random_batch(rng, 10, 2 + rng.below(3));
    double sum = 0.0;
    for (const auto& item : batch) sum += oracle_default_ensemble(lambdas, item.y, item.yhat);
    double r = -1.0;
    for (double l : lambdas) r += l * l;
    const double expected = sum + params.eta1 * r + params.eta2 * r * r;
    CHECK(std::abs(total_objective(state, params, batch) - expected) <= 1e-10);
    CHECK(std::abs(total_objective(state, params, batch, Reduction::Mean) -
                   (sum / 10.0 + params.eta1 * r + params.eta2 * r * r)) <= 1e-10);
  }
}

TEST_CASE("grad_lambda examples") {
  Rng rng(1);
  const auto batch = random_batch(rng, 5, 3);
  const auto zero = grad_lambda(EnsembleState({0, 0, 0}, {kSquare, kHinge, kSquare}), {0.001, 200}, batch);
  CHECK(zero == std::vector<double>{0, 0, 0});

  const auto state = EnsembleState({0.6, 0.8}, {kSquare, kHinge});
  const auto g = grad_lambda(state, {0.0, 200}, batch);
  double sq = 0.0, hi = 0.0;
  for (const auto& item : batch) {
    sq += oracle::square(item.y, item.yhat);
    std::size_t t = 0;
    while (item.y[t] != 1.0) ++t;
    hi += oracle::hinge(item.yhat[t]);
  }
  // 0.36 + 0.64 = 1 so the penalty contributes nothing.
  CHECK(g[0] == doctest::Approx(2 * 0.6 * sq).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(2 * 0.8 * hi).epsilon(1e-12));

  const auto from_totals = grad_lambda_from_totals(state, {0.0, 200}, std::vector<double>{sq, hi});
  CHECK(from_totals[0] == doctest::Approx(g[0]).epsilon(1e-14));
  CHECK(from_totals[1] == doctest::Approx(g[1]).epsilon(1e-14));
  CHECK_THROWS_AS(grad_lambda(state, {}, std::vector<BatchItem>{}), std::invalid_argument);
}

TEST_CASE("grad_lambda matches finite differences, 20 samples") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    auto state = EnsembleState::default_ensemble();
    const std::vector<double> lambdas{0.6 * rng.normal(), 0.6 * rng.normal(), 0.6 * rng.normal()};
    state.set_lambdas(lambdas);
    const PenaltyParams params{0.001, 200};
    const auto batch = random_batch(rng, 20, 3);
    const auto numeric = fd_gradient(
        [&](std::span<const double> l) {
          auto probe = state;
          probe.set_lambdas({l.begin(), l.end()});
          return total_objective(probe, params, batch);
        },
        lambdas);
    const auto analytic = grad_lambda(state, params, batch);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(analytic[j] - numeric[j]) <=
            1e-5 * std::fmax(std::abs(analytic[j]), std::abs(numeric[j])) + 1e-7);
    }
  }
}

TEST_CASE("grad_yhat_ensemble examples") {
  const std::vector<double> y{0, 1, 0};
  const std::vector<double> yhat{0.2, 0.5, 0.3};
  auto state = EnsembleState::default_ensemble();
  state.set_lambdas({0, 0, 0});
  CHECK(grad_yhat_ensemble(state, y, yhat) == std::vector<double>{0, 0, 0});
  CHECK(grad_yhat_ensemble(EnsembleState({1.0}, {kSquare}), y, yhat) ==
        loss_grad_yhat(kSquare, y, yhat));
  CHECK_THROWS_AS(grad_yhat_ensemble(EnsembleState({1.0}, {{LossKind::ZeroOne}}), y, yhat),
                  std::invalid_argument);

  Rng rng(8);
  state.set_lambdas({rng.normal(), rng.normal(), rng.normal()});
  const auto p = oracle::random_probs(rng, 3);
  const auto numeric =
      fd_gradient([&](std::span<const double> q) { return ensemble_loss(state, y, q); }, p);
  const auto analytic = grad_yhat_ensemble(state, y, p);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(analytic[i] - numeric[i]) <=
          1e-5 * std::fmax(std::abs(analytic[i]), std::abs(numeric[i])) + 1e-9);
  }
}

TEST_CASE("objective sees only squared lambdas") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    auto state = EnsembleState::default_ensemble();
    std::vector<double> l{rng.normal(), rng.normal(), rng.normal()};
    state.set_lambdas(l);
    const auto batch = random_batch(rng, 4, 3);
    const double base = total_objective(state, {0.001, 200}, batch);
    l[rng.below(3)] *= -1.0;
    state.set_lambdas(l);
    CHECK(total_objective(state, {0.001, 200}, batch) == base);
  }
}

TEST_CASE("penalty is zero only on the sphere and grows like eta2 r^2") {
  const PenaltyParams params{0.0, 200};
  double prev_ratio = 0.0;
  for (double scale : {2.0, 10.0, 100.0, 1000.0}) {
    const EnsembleState s({scale}, {kHinge});
    const double r = scale * scale - 1.0;
    prev_ratio = penalty(s, params) / (r * r);
    CHECK(prev_ratio == doctest::Approx(200.0).epsilon(1e-12));
  }
  const PenaltyParams with_linear{0.001, 200};
  const double r = 1e6;
  const EnsembleState big({std::sqrt(r + 1.0)}, {kHinge});
  CHECK(penalty(big, with_linear) / (r * r) == doctest::Approx(200.0).epsilon(1e-6));
  CHECK(penalty(EnsembleState({1.0}, {kHinge}), with_linear) == 0.0);
  CHECK(penalty(EnsembleState({0.999}, {kHinge}), with_linear) != 0.0);
}

TEST_CASE("gradients match finite differences on 100 random configurations") {
  Rng rng(4242);
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t m = 1 + rng.below(4);
    std::vector<LossSpec> specs;
    std::vector<double> lambdas;
    const LossSpec pool[] = {kSquare, kHinge, {LossKind::Correntropy, 0.8},
                             {LossKind::CrossEntropyMargin}, {LossKind::CategoricalCrossEntropy}};
    for (std::size_t j = 0; j < m; ++j) {
      specs.push_back(pool[rng.below(5)]);
      lambdas.push_back(rng.normal());
    }
    const EnsembleState state(lambdas, specs);
    const PenaltyParams params{0.001, 200};
    const std::size_t c = 2 + rng.below(3);
    const auto batch = random_batch(rng, 8, c);
    const auto num_l = fd_gradient(
        [&](std::span<const double> l) {
          return total_objective(EnsembleState({l.begin(), l.end()}, specs), params, batch);
        },
        lambdas);
    if (!check(grad_lambda(state, params, batch), num_l).pass) ++failures;
    const auto& item = batch.front();
    const auto num_y = fd_gradient(
        [&](std::span<const double> q) { return ensemble_loss(state, item.y, q); }, item.yhat);
    if (!check(grad_yhat_ensemble(state, item.y, item.yhat), num_y).pass) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("state accessors and validation") {
  const EnsembleState s({0.6, -0.8}, {kSquare, kHinge});
  CHECK(s.constraint_residual() == doctest::Approx(0.0).epsilon(1e-15));
  const auto w = s.mixture_weights();
  CHECK(w[0] == doctest::Approx(0.36));
  CHECK(w[1] == doctest::Approx(0.64));
  const auto n = EnsembleState({2.0, 2.0}, {kSquare, kHinge}).normalized_weights();
  CHECK(n[0] == 0.5);
  CHECK(EnsembleState({0.0, 0.0}, {kSquare, kHinge}).normalized_weights() ==
        std::vector<double>{0, 0});
  CHECK_THROWS_AS(EnsembleState({1.0}, {kSquare, kHinge}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleState({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleState({NAN}, {kSquare}), std::invalid_argument);
  CHECK_THROWS(PenaltyParams{300, 200}.validate());
  CHECK_THROWS(PenaltyParams{0.0, 0.0}.validate());
  CHECK_THROWS(PenaltyParams{-1, 200}.validate());
  CHECK_NOTHROW(PenaltyParams{}.validate());
  auto d = EnsembleState::default_ensemble();
  CHECK(d.size() == 3);
  CHECK(d.specs()[0].kind == LossKind::Correntropy);
  CHECK(d.specs()[1].kind == LossKind::Hinge);
  CHECK(d.specs()[2].kind == LossKind::CrossEntropyMargin);
  CHECK(d.all_differentiable());
  CHECK_THROWS_AS(d.set_lambdas({1.0}), std::invalid_argument);
}
