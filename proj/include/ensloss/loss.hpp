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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ensloss {

/// Weak losses available to an ensemble.
///
/// Margin losses see the prediction only through z = y . yhat, which for a
/// one-hot y is the predicted probability of the true class. Distance losses
/// see the residual y - yhat.
enum class LossKind {
  ZeroOne,
  Hinge,
  SmoothedHinge,
  Square,
  Correntropy,
  CrossEntropyMargin,       // log(1 + exp(-z))
  CategoricalCrossEntropy,  // -log yhat[true class]
  Absolute,
};

inline constexpr LossKind kAllLossKinds[] = {
    LossKind::ZeroOne,     LossKind::Hinge,
    LossKind::SmoothedHinge, LossKind::Square,
    LossKind::Correntropy, LossKind::CrossEntropyMargin,
    LossKind::CategoricalCrossEntropy, LossKind::Absolute,
};

enum class CorrentropyForm {
  Canonical,  // 1 - exp(-|y - yhat|^2 / sigma^2), bounded in [0, 1)
  AsWritten,  // exp(+|y - yhat|^2 / sigma^2), unbounded, minimum 1
};

struct LossSpec {
  LossKind kind = LossKind::Hinge;
  double sigma = 1.0;  // Correntropy kernel width
  CorrentropyForm correntropy_form = CorrentropyForm::Canonical;

  /// Throws std::invalid_argument when sigma is not a positive finite number.
  void validate() const;

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

bool is_differentiable(LossKind kind) noexcept;
bool is_margin_based(LossKind kind) noexcept;

/// Short identifier used in config files and result tables, e.g. "ce_margin".
std::string_view loss_name(LossKind kind) noexcept;
std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept;

std::string_view correntropy_form_name(CorrentropyForm form) noexcept;
std::optional<CorrentropyForm> parse_correntropy_form(std::string_view name) noexcept;

/// Value of a margin loss as a function of the scalar margin z.
/// Throws std::invalid_argument for distance losses.
double margin_loss_value(LossKind kind, double z);

/// dL/dz of a margin loss. Throws for distance losses and ZeroOne.
double margin_loss_derivative(LossKind kind, double z);

/// L(y, yhat). `y` must be one-hot with the same length as `yhat`.
double loss_value(const LossSpec& spec, std::span<const double> y,
                  std::span<const double> yhat);

/// dL/dyhat, componentwise. Throws std::invalid_argument for ZeroOne.
std::vector<double> loss_grad_yhat(const LossSpec& spec, std::span<const double> y,
                                   std::span<const double> yhat);

/// One-hot vector of length `classes` with a 1 at `label`.
std::vector<double> one_hot(std::size_t label, std::size_t classes);

}  // namespace ensloss
