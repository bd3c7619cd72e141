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

#include "ensloss/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ensloss {
namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kExpArgCap = 700.0;

void require_one_hot(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw std::invalid_argument("loss: y has " + std::to_string(y.size()) +
                                " entries but yhat has " + std::to_string(yhat.size()));
  }
  if (y.empty()) throw std::invalid_argument("loss: empty label vector");
  std::size_t ones = 0;
  for (double v : y) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      throw std::invalid_argument("loss: y is not one-hot");
    }
  }
  if (ones != 1) throw std::invalid_argument("loss: y is not one-hot");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_residual(std::span<const double> y, std::span<const double> yhat) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    s += r * r;
  }
  return s;
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// 1 / (1 + exp(-t)).
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void LossSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("loss: sigma must be positive and finite, got " +
                                std::to_string(sigma));
  }
}

bool is_differentiable(LossKind kind) noexcept { return kind != LossKind::ZeroOne; }

bool is_margin_based(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::ZeroOne:
    case LossKind::Hinge:
    case LossKind::SmoothedHinge:
    case LossKind::CrossEntropyMargin:
    case LossKind::CategoricalCrossEntropy:
      return true;
    case LossKind::Square:
    case LossKind::Correntropy:
    case LossKind::Absolute:
      return false;
  }
  return false;
}

std::string_view loss_name(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::ZeroOne: return "zero_one";
    case LossKind::Hinge: return "hinge";
    case LossKind::SmoothedHinge: return "smoothed_hinge";
    case LossKind::Square: return "square";
    case LossKind::Correntropy: return "correntropy";
    case LossKind::CrossEntropyMargin: return "ce_margin";
    case LossKind::CategoricalCrossEntropy: return "ce_categorical";
    case LossKind::Absolute: return "absolute";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) noexcept {
  for (LossKind k : kAllLossKinds) {
    if (loss_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view correntropy_form_name(CorrentropyForm form) noexcept {
  return form == CorrentropyForm::Canonical ? "canonical" : "as_written";
}

std::optional<CorrentropyForm> parse_correntropy_form(std::string_view name) noexcept {
  if (name == "canonical") return CorrentropyForm::Canonical;
  if (name == "as_written") return CorrentropyForm::AsWritten;
  return std::nullopt;
}

double margin_loss_value(LossKind kind, double z) {
  switch (kind) {
    case LossKind::ZeroOne:
      return z >= 0.0 ? 0.0 : 1.0;
    case LossKind::Hinge:
      return z >= 1.0 ? 0.0 : std::max(0.0, 1.0 - z);
    case LossKind::SmoothedHinge:
      // Piecewise exactly as tabulated; jumps at z = 0 and z = 1.
      if (z >= 1.0) return 0.0;
      if (z >= 0.0) return (1.0 - z * z) / 2.0;
      return std::max(0.0, 1.0 - z);
    case LossKind::CrossEntropyMargin:
      return softplus(-z);
    case LossKind::CategoricalCrossEntropy:
      return -std::log(std::clamp(z, kProbFloor, 1.0));
    default:
      throw std::invalid_argument("margin_loss_value: " + std::string(loss_name(kind)) +
                                  " is not a margin loss");
  }
}

double margin_loss_derivative(LossKind kind, double z) {
  switch (kind) {
    case LossKind::Hinge:
      return z >= 1.0 ? 0.0 : -1.0;
    case LossKind::SmoothedHinge:
      if (z >= 1.0) return 0.0;
      if (z >= 0.0) return -z;
      return -1.0;
    case LossKind::CrossEntropyMargin:
      return -logistic(-z);
    case LossKind::CategoricalCrossEntropy:
      return (z > kProbFloor && z < 1.0) ? -1.0 / z : 0.0;
    case LossKind::ZeroOne:
      throw std::invalid_argument("margin_loss_derivative: zero_one is not differentiable");
    default:
      throw std::invalid_argument("margin_loss_derivative: " +
                                  std::string(loss_name(kind)) + " is not a margin loss");
  }
}

double loss_value(const LossSpec& spec, std::span<const double> y,
                  std::span<const double> yhat) {
  spec.validate();
  require_one_hot(y, yhat);
  if (is_margin_based(spec.kind)) return margin_loss_value(spec.kind, dot(y, yhat));

  switch (spec.kind) {
    case LossKind::Square:
      return squared_residual(y, yhat);
    case LossKind::Correntropy: {
      const double scaled = squared_residual(y, yhat) / (spec.sigma * spec.sigma);
      if (spec.correntropy_form == CorrentropyForm::Canonical) {
        return -std::expm1(-scaled);
      }
      return std::exp(std::min(scaled, kExpArgCap));
    }
    case LossKind::Absolute: {
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
      return s;
    }
    default:
      break;
  }
  throw std::logic_error("loss_value: unhandled loss kind");
}

std::vector<double> loss_grad_yhat(const LossSpec& spec, std::span<const double> y,
                                   std::span<const double> yhat) {
  spec.validate();
  require_one_hot(y, yhat);
  if (!is_differentiable(spec.kind)) {
    throw std::invalid_argument("loss_grad_yhat: " + std::string(loss_name(spec.kind)) +
                                " is not differentiable");
  }

  std::vector<double> grad(yhat.size(), 0.0);
  if (is_margin_based(spec.kind)) {
    const double dz = margin_loss_derivative(spec.kind, dot(y, yhat));
    for (std::size_t i = 0; i < y.size(); ++i) grad[i] = dz * y[i];
    return grad;
  }

  switch (spec.kind) {
    case LossKind::Square:
      for (std::size_t i = 0; i < y.size(); ++i) grad[i] = 2.0 * (yhat[i] - y[i]);
      break;
    case LossKind::Correntropy: {
      const double inv_s2 = 1.0 / (spec.sigma * spec.sigma);
      const double scaled = squared_residual(y, yhat) * inv_s2;
      double outer = 0.0;
      if (spec.correntropy_form == CorrentropyForm::Canonical) {
        outer = std::exp(-scaled) * inv_s2;
      } else if (scaled < kExpArgCap) {
        outer = std::exp(scaled) * inv_s2;
      }
      for (std::size_t i = 0; i < y.size(); ++i) grad[i] = outer * 2.0 * (yhat[i] - y[i]);
      break;
    }
    case LossKind::Absolute:
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = yhat[i] - y[i];
        grad[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
      }
      break;
    default:
      throw std::logic_error("loss_grad_yhat: unhandled loss kind");
  }
  return grad;
}

std::vector<double> one_hot(std::size_t label, std::size_t classes) {
  if (label >= classes) {
    throw std::invalid_argument("one_hot: label " + std::to_string(label) +
                                " out of range for " + std::to_string(classes) + " classes");
  }
  std::vector<double> v(classes, 0.0);
  v[label] = 1.0;
  return v;
}

}  // namespace ensloss
