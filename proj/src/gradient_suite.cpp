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

#include "ensloss/gradient_suite.hpp"

#include <algorithm>
#include <numeric>

#include "ensloss/ensemble.hpp"
#include "ensloss/model.hpp"
#include "ensloss/rng.hpp"
#include "ensloss/trainer.hpp"

namespace ensloss {
namespace {

std::vector<double> random_probs(Rng& rng, std::size_t classes) {
  std::vector<double> logits(classes);
  for (double& v : logits) v = 2.0 * rng.normal();
  return softmax(logits);
}

void record(GradientBlockResult& block, const CheckReport& report) {
  ++block.configurations;
  if (!report.pass) ++block.failures;
  block.max_rel_error = std::max(block.max_rel_error, report.max_rel_error);
}

std::vector<LossSpec> differentiable_specs() {
  std::vector<LossSpec> specs;
  for (LossKind kind : kAllLossKinds) {
    if (is_differentiable(kind)) specs.push_back({kind, 1.0, CorrentropyForm::Canonical});
  }
  specs.push_back({LossKind::Correntropy, 1.0, CorrentropyForm::AsWritten});
  return specs;
}

std::string spec_label(const LossSpec& spec) {
  std::string name(loss_name(spec.kind));
  if (spec.kind == LossKind::Correntropy) name += "/" + std::string(correntropy_form_name(spec.correntropy_form));
  return name;
}

}  // namespace

std::vector<GradientBlockResult> run_gradient_suite(const GradientSuiteOptions& opt) {
  std::vector<GradientBlockResult> blocks;
  Rng rng(opt.seed);
  const auto specs = differentiable_specs();

  for (const auto& spec : specs) {
    GradientBlockResult block{"dL/dyhat " + spec_label(spec)};
    for (std::size_t k = 0; k < opt.configurations; ++k) {
      const std::size_t classes = 2 + static_cast<std::size_t>(rng.below(4));
      const auto y = one_hot(static_cast<std::size_t>(rng.below(classes)), classes);
      const auto yhat = random_probs(rng, classes);
      const auto numeric = fd_gradient(
          [&](std::span<const double> p) { return loss_value(spec, y, p); }, yhat, opt.fd);
      record(block, check(loss_grad_yhat(spec, y, yhat), numeric, opt.rel_tol, opt.abs_tol));
    }
    blocks.push_back(std::move(block));
  }

  {
    GradientBlockResult block{"ensemble dL/dlambda"};
    for (std::size_t k = 0; k < opt.configurations; ++k) {
      const std::size_t m = 1 + static_cast<std::size_t>(rng.below(4));
      std::vector<LossSpec> chosen;
      std::vector<double> lambdas;
      for (std::size_t j = 0; j < m; ++j) {
        chosen.push_back(specs[static_cast<std::size_t>(rng.below(specs.size()))]);
        lambdas.push_back(0.7 * rng.normal());
      }
      const EnsembleState state(lambdas, chosen);
      const PenaltyParams penalty{0.001, 200.0};
      const auto reduction = k % 2 ? Reduction::Mean : Reduction::Sum;
      const std::size_t classes = 2 + static_cast<std::size_t>(rng.below(3));
      std::vector<BatchItem> batch;
      for (int i = 0; i < 20; ++i) {
        batch.push_back({one_hot(static_cast<std::size_t>(rng.below(classes)), classes),
                         random_probs(rng, classes)});
      }
      const auto numeric = fd_gradient(
          [&](std::span<const double> l) {
            const EnsembleState probe(std::vector<double>(l.begin(), l.end()), chosen);
            return total_objective(probe, penalty, batch, reduction);
          },
          lambdas, opt.fd);
      record(block, check(grad_lambda(state, penalty, batch, reduction), numeric, opt.rel_tol,
                          opt.abs_tol));
    }
    blocks.push_back(std::move(block));
  }

  {
    GradientBlockResult block{"ensemble dL/dyhat"};
    for (std::size_t k = 0; k < opt.configurations; ++k) {
      auto state = EnsembleState::default_ensemble();
      state.set_lambdas({rng.normal(), rng.normal(), rng.normal()});
      const std::size_t classes = 2 + static_cast<std::size_t>(rng.below(4));
      const auto y = one_hot(static_cast<std::size_t>(rng.below(classes)), classes);
      const auto yhat = random_probs(rng, classes);
      const auto numeric = fd_gradient(
          [&](std::span<const double> p) { return ensemble_loss(state, y, p); }, yhat, opt.fd);
      record(block, check(grad_yhat_ensemble(state, y, yhat), numeric, opt.rel_tol, opt.abs_tol));
    }
    blocks.push_back(std::move(block));
  }

  {
    constexpr std::size_t kWords = 5;
    constexpr std::size_t kClasses = 3;
    GradientBlockResult w_block{"composite dJ/dW"};
    GradientBlockResult b_block{"composite dJ/db"};
    GradientBlockResult l_block{"composite dJ/dlambda"};
    for (std::size_t k = 0; k < opt.configurations; ++k) {
      Dataset data;
      data.num_features = kWords;
      data.num_classes = kClasses;
      for (int d = 0; d < 6; ++d) {
        SparseFeatureVector x;
        double total = 0.0;
        for (std::uint32_t i = 0; i < kWords; ++i) {
          if (rng.uniform() < 0.6) {
            x.indices.push_back(i);
            x.values.push_back(1.0 + static_cast<double>(rng.below(4)));
            total += x.values.back();
          }
        }
        for (double& v : x.values) v /= total;
        data.features.push_back(std::move(x));
        data.labels.push_back(static_cast<std::size_t>(rng.below(kClasses)));
      }
      ModelParams params(kWords, kClasses);
      for (double& w : params.weights()) w = rng.normal();
      for (double& b : params.bias()) b = 0.5 * rng.normal();
      auto state = EnsembleState::default_ensemble();
      state.set_lambdas({0.5 + 0.2 * rng.normal(), 0.5 + 0.2 * rng.normal(), 0.5 + 0.2 * rng.normal()});
      const PenaltyParams penalty{0.001, 200.0};
      const auto reduction = k % 2 ? Reduction::Mean : Reduction::Sum;
      std::vector<std::size_t> batch(data.size());
      std::iota(batch.begin(), batch.end(), std::size_t{0});

      const auto analytic = batch_gradient(params, state, data, batch, penalty, reduction);
      const std::size_t nw = params.weights().size();
      std::vector<double> point(params.weights().begin(), params.weights().end());
      point.insert(point.end(), params.bias().begin(), params.bias().end());
      point.insert(point.end(), state.lambdas().begin(), state.lambdas().end());

      const auto numeric = fd_gradient(
          [&](std::span<const double> p) {
            ModelParams probe(kWords, kClasses, std::vector<double>(p.begin(), p.begin() + nw),
                              std::vector<double>(p.begin() + nw, p.begin() + nw + kClasses));
            auto s = state;
            s.set_lambdas(std::vector<double>(p.begin() + nw + kClasses, p.end()));
            return batch_objective(probe, s, data, batch, penalty, reduction);
          },
          point, opt.fd);
      const std::span<const double> num(numeric);
      record(w_block, check(analytic.weights, num.subspan(0, nw), opt.rel_tol, opt.abs_tol));
      record(b_block, check(analytic.bias, num.subspan(nw, kClasses), opt.rel_tol, opt.abs_tol));
      record(l_block, check(analytic.lambdas, num.subspan(nw + kClasses), opt.rel_tol, opt.abs_tol));
    }
    blocks.push_back(std::move(w_block));
    blocks.push_back(std::move(b_block));
    blocks.push_back(std::move(l_block));
  }
  return blocks;
}

}  // namespace ensloss
