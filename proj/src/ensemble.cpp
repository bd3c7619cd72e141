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

#include "ensloss/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ensloss {

void PenaltyParams::validate() const {
  if (!(eta1 >= 0.0) || !std::isfinite(eta1)) {
    throw std::invalid_argument("penalty: eta1 must be nonnegative, got " + std::to_string(eta1));
  }
  if (!(eta2 > 0.0) || !std::isfinite(eta2)) {
    throw std::invalid_argument("penalty: eta2 must be positive, got " + std::to_string(eta2));
  }
  if (!(eta2 > eta1)) {
    throw std::invalid_argument("penalty: eta2 must exceed eta1");
  }
}

EnsembleState::EnsembleState(std::vector<double> lambdas, std::vector<LossSpec> specs)
    : specs_(std::move(specs)) {
  if (specs_.empty()) throw std::invalid_argument("ensemble: at least one loss is required");
  for (const auto& s : specs_) s.validate();
  set_lambdas(std::move(lambdas));
}

EnsembleState EnsembleState::uniform(std::vector<LossSpec> specs) {
  const std::size_t m = specs.size();
  if (m == 0) throw std::invalid_argument("ensemble: at least one loss is required");
  // 1/sqrt(M) is rarely exact. Nudge the last weight by a few ulps until the
  // squares sum to 1 in the order constraint_residual uses, so the penalty
  // starts at exactly 0.
  std::vector<double> lambdas(m, 1.0 / std::sqrt(static_cast<double>(m)));
  const auto residual = [&] {
    double s = 0.0;
    for (double v : lambdas) s += v * v;
    return s - 1.0;
  };
  const double base = lambdas.back();
  double up = base, down = base;
  for (int step = 0; step < 64 && residual() != 0.0; ++step) {
    up = std::nextafter(up, 2.0);
    down = std::nextafter(down, 0.0);
    lambdas.back() = down;
    if (residual() == 0.0) break;
    lambdas.back() = up;
    if (residual() == 0.0) break;
    lambdas.back() = base;
  }
  return EnsembleState(std::move(lambdas), std::move(specs));
}

EnsembleState EnsembleState::default_ensemble(double sigma) {
  return uniform({
      LossSpec{LossKind::Correntropy, sigma, CorrentropyForm::Canonical},
      LossSpec{LossKind::Hinge, sigma, CorrentropyForm::Canonical},
      LossSpec{LossKind::CrossEntropyMargin, sigma, CorrentropyForm::Canonical},
  });
}

void EnsembleState::set_lambdas(std::vector<double> lambdas) {
  if (lambdas.size() != specs_.size()) {
    throw std::invalid_argument("ensemble: expected " + std::to_string(specs_.size()) +
                                " lambdas, got " + std::to_string(lambdas.size()));
  }
  for (double v : lambdas) {
    if (!std::isfinite(v)) throw std::invalid_argument("ensemble: non-finite lambda");
  }
  lambdas_ = std::move(lambdas);
}

bool EnsembleState::all_differentiable() const noexcept {
  for (const auto& s : specs_) {
    if (!is_differentiable(s.kind)) return false;
  }
  return true;
}

std::vector<double> EnsembleState::mixture_weights() const {
  std::vector<double> w(lambdas_.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = lambdas_[j] * lambdas_[j];
  return w;
}

std::vector<double> EnsembleState::normalized_weights() const {
  auto w = mixture_weights();
  double total = 0.0;
  for (double v : w) total += v;
  if (total > 0.0) {
    for (double& v : w) v /= total;
  }
  return w;
}

double EnsembleState::constraint_residual() const noexcept {
  double s = 0.0;
  for (double v : lambdas_) s += v * v;
  return s - 1.0;
}

std::vector<double> weak_loss_values(const EnsembleState& state, std::span<const double> y,
                                     std::span<const double> yhat) {
  std::vector<double> values;
  values.reserve(state.size());
  for (const auto& spec : state.specs()) values.push_back(loss_value(spec, y, yhat));
  return values;
}

double ensemble_loss(const EnsembleState& state, std::span<const double> y,
                     std::span<const double> yhat) {
  const auto lambdas = state.lambdas();
  const auto specs = state.specs();
  double total = 0.0;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    total += lambdas[j] * lambdas[j] * loss_value(specs[j], y, yhat);
  }
  return total;
}

double penalty(const EnsembleState& state, const PenaltyParams& params) {
  const double r = state.constraint_residual();
  return params.eta1 * r + params.eta2 * r * r;
}

namespace {

std::vector<double> reduced_loss_totals(const EnsembleState& state,
                                        std::span<const BatchItem> batch, Reduction reduction) {
  if (batch.empty()) throw std::invalid_argument("ensemble: empty batch");
  std::vector<double> totals(state.size(), 0.0);
  for (const auto& item : batch) {
    const auto values = weak_loss_values(state, item.y, item.yhat);
    for (std::size_t j = 0; j < totals.size(); ++j) totals[j] += values[j];
  }
  if (reduction == Reduction::Mean) {
    for (double& t : totals) t /= static_cast<double>(batch.size());
  }
  return totals;
}

}  // namespace

double total_objective(const EnsembleState& state, const PenaltyParams& params,
                       std::span<const BatchItem> batch, Reduction reduction) {
  if (batch.empty()) throw std::invalid_argument("total_objective: empty batch");
  double data = 0.0;
  for (const auto& item : batch) data += ensemble_loss(state, item.y, item.yhat);
  if (reduction == Reduction::Mean) data /= static_cast<double>(batch.size());
  return data + penalty(state, params);
}

std::vector<double> grad_lambda_from_totals(const EnsembleState& state,
                                            const PenaltyParams& params,
                                            std::span<const double> loss_totals) {
  if (loss_totals.size() != state.size()) {
    throw std::invalid_argument("grad_lambda: expected one loss total per weak loss");
  }
  const double r = state.constraint_residual();
  const double shared = params.eta1 + 2.0 * params.eta2 * r;
  const auto lambdas = state.lambdas();
  std::vector<double> grad(state.size());
  for (std::size_t j = 0; j < grad.size(); ++j) {
    grad[j] = 2.0 * lambdas[j] * (loss_totals[j] + shared);
  }
  return grad;
}

std::vector<double> grad_lambda(const EnsembleState& state, const PenaltyParams& params,
                                std::span<const BatchItem> batch, Reduction reduction) {
  return grad_lambda_from_totals(state, params, reduced_loss_totals(state, batch, reduction));
}

std::vector<double> grad_yhat_ensemble(const EnsembleState& state, std::span<const double> y,
                                       std::span<const double> yhat) {
  if (!state.all_differentiable()) {
    throw std::invalid_argument("grad_yhat_ensemble: ensemble contains a non-differentiable loss");
  }
  std::vector<double> grad(yhat.size(), 0.0);
  const auto lambdas = state.lambdas();
  const auto specs = state.specs();
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const double w = lambdas[j] * lambdas[j];
    if (w == 0.0) continue;
    const auto g = loss_grad_yhat(specs[j], y, yhat);
    for (std::size_t c = 0; c < grad.size(); ++c) grad[c] += w * g[c];
  }
  return grad;
}

}  // namespace ensloss
