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

#include "ensloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ensloss/errors.hpp"

namespace ensloss {

std::vector<double> fd_gradient(const ScalarObjective& objective, std::span<const double> point,
                                const FiniteDiffSpec& spec) {
  if (!(spec.step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  std::vector<double> probe(point.begin(), point.end());
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double origin = probe[i];
    probe[i] = origin + spec.step;
    const double up = objective(probe);
    probe[i] = origin - spec.step;
    const double down = objective(probe);
    probe[i] = origin;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError("fd_gradient: non-finite objective at component " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * spec.step);
  }
  return grad;
}

CheckReport check(std::span<const double> analytic, std::span<const double> numeric,
                  double rel_tol, double abs_tol) {
  if (analytic.size() != numeric.size()) {
    throw std::invalid_argument("check: length mismatch");
  }
  CheckReport report;
  report.components.reserve(analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double n = numeric[i];
    const double err = std::abs(a - n);
    const double scale = std::max(std::abs(a), std::abs(n));
    const bool ok = err <= abs_tol + rel_tol * scale;
    if (scale > 0.0) report.max_rel_error = std::max(report.max_rel_error, err / scale);
    report.components.push_back({i, a, n, err, ok});
    report.pass = report.pass && ok;
  }
  return report;
}

std::string CheckReport::summary() const {
  std::size_t failed = 0;
  for (const auto& c : components) failed += c.ok ? 0 : 1;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s: %zu/%zu components ok, max rel error %.3e",
                pass ? "PASS" : "FAIL", components.size() - failed, components.size(),
                max_rel_error);
  return buf;
}

}  // namespace ensloss
