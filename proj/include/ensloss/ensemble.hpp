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

#include <span>
#include <vector>

#include "ensloss/loss.hpp"

namespace ensloss {

/// Penalty coefficients of the augmented-Lagrangian term
/// eta1 * r + eta2 * r^2, where r = sum(lambda^2) - 1.
struct PenaltyParams {
  double eta1 = 0.001;
  double eta2 = 200.0;

  /// Requires eta1 >= 0, eta2 > 0 and eta2 > eta1.
  void validate() const;
};

/// Weak losses and their raw weights. Mixture weight of loss j is lambda_j^2.
class EnsembleState {
 public:
  EnsembleState(std::vector<double> lambdas, std::vector<LossSpec> specs);

  /// Every lambda set to 1/sqrt(M), so sum(lambda^2) = 1 exactly.
  static EnsembleState uniform(std::vector<LossSpec> specs);

  /// Correntropy (canonical, sigma = 1), Hinge and margin cross-entropy.
  static EnsembleState default_ensemble(double sigma = 1.0);

  std::size_t size() const noexcept { return specs_.size(); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  std::span<const LossSpec> specs() const noexcept { return specs_; }

  /// Replaces the raw weights. Same length required, entries finite.
  void set_lambdas(std::vector<double> lambdas);

  bool all_differentiable() const noexcept;

  /// lambda_j^2.
  std::vector<double> mixture_weights() const;
  /// lambda_j^2 / sum_k lambda_k^2. All zero when every lambda is zero.
  std::vector<double> normalized_weights() const;
  /// sum_j lambda_j^2 - 1.
  double constraint_residual() const noexcept;

  friend bool operator==(const EnsembleState&, const EnsembleState&) = default;

 private:
  std::vector<double> lambdas_;
  std::vector<LossSpec> specs_;
};

/// How per-sample losses are combined before the penalty is added once.
enum class Reduction {
  Sum,   // sum_i L(i), the full-sum objective
  Mean,  // (1/n) sum_i L(i)
};

/// One labeled prediction of a batch.
struct BatchItem {
  std::vector<double> y;     // one-hot
  std::vector<double> yhat;  // probability vector
};

/// sum_j lambda_j^2 L_j(y, yhat).
double ensemble_loss(const EnsembleState& state, std::span<const double> y,
                     std::span<const double> yhat);

/// Per-loss values L_j(y, yhat), in the order of specs().
std::vector<double> weak_loss_values(const EnsembleState& state, std::span<const double> y,
                                     std::span<const double> yhat);

/// eta1 * r + eta2 * r^2 with r = sum(lambda^2) - 1.
double penalty(const EnsembleState& state, const PenaltyParams& params);

/// Reduced ensemble loss over the batch plus a single penalty term.
/// Throws std::invalid_argument on an empty batch.
double total_objective(const EnsembleState& state, const PenaltyParams& params,
                       std::span<const BatchItem> batch, Reduction reduction = Reduction::Sum);

/// d total_objective / d lambda. Component j is
/// 2 lambda_j (S_j + eta1 + 2 eta2 r), S_j the reduced batch loss of weak loss j.
std::vector<double> grad_lambda(const EnsembleState& state, const PenaltyParams& params,
                                std::span<const BatchItem> batch,
                                Reduction reduction = Reduction::Sum);

/// Same gradient from precomputed reduced loss totals S_j.
std::vector<double> grad_lambda_from_totals(const EnsembleState& state,
                                            const PenaltyParams& params,
                                            std::span<const double> loss_totals);

/// sum_j lambda_j^2 dL_j/dyhat. Throws if any weak loss is not differentiable.
std::vector<double> grad_yhat_ensemble(const EnsembleState& state, std::span<const double> y,
                                       std::span<const double> yhat);

}  // namespace ensloss
