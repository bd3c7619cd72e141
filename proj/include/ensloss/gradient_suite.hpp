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

#include <cstdint>
#include <string>
#include <vector>

#include "ensloss/gradcheck.hpp"

namespace ensloss {

struct GradientBlockResult {
  std::string name;
  std::size_t configurations = 0;
  std::size_t failures = 0;
  double max_rel_error = 0.0;

  bool pass() const noexcept { return failures == 0 && configurations > 0; }
};

struct GradientSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t configurations = 100;
  FiniteDiffSpec fd;
  double rel_tol = kDefaultRelTol;
  double abs_tol = kDefaultAbsTol;
};

/// Compares every analytic gradient in the library against central finite
/// differences on random configurations:
///  - each differentiable loss w.r.t. yhat,
///  - the ensemble loss w.r.t. yhat and the batch objective w.r.t. lambda,
///  - the composite objective w.r.t. W, b and lambda on a 5-word, 3-class
///    problem with the default ensemble.
std::vector<GradientBlockResult> run_gradient_suite(const GradientSuiteOptions& options);

}  // namespace ensloss
