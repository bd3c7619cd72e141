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

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ensloss {

struct FiniteDiffSpec {
  double step = 1e-6;
};

using ScalarObjective = std::function<double(std::span<const double>)>;

/// Central differences: (f(p + h e_i) - f(p - h e_i)) / 2h for every i.
/// Throws NumericalError when an evaluation is not finite and
/// std::invalid_argument when step <= 0.
std::vector<double> fd_gradient(const ScalarObjective& objective, std::span<const double> point,
                                const FiniteDiffSpec& spec = {});

struct ComponentCheck {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double abs_error = 0.0;
  bool ok = true;
};

struct CheckReport {
  bool pass = true;
  std::vector<ComponentCheck> components;
  /// Largest |a - n| / max(|a|, |n|) over components, 0 when both are zero.
  double max_rel_error = 0.0;

  std::string summary() const;
};

inline constexpr double kDefaultRelTol = 1e-4;
inline constexpr double kDefaultAbsTol = 1e-7;

/// Component i passes iff |a_i - n_i| <= abs_tol + rel_tol * max(|a_i|, |n_i|).
CheckReport check(std::span<const double> analytic, std::span<const double> numeric,
                  double rel_tol = kDefaultRelTol, double abs_tol = kDefaultAbsTol);

}  // namespace ensloss
