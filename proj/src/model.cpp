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

#include "ensloss/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ensloss/errors.hpp"

namespace ensloss {

ModelParams::ModelParams(std::size_t features, std::size_t classes)
    : features_(features),
      classes_(classes),
      weights_(features * classes, 0.0),
      bias_(classes, 0.0) {
  if (classes == 0) throw std::invalid_argument("model: at least one class is required");
}

ModelParams::ModelParams(std::size_t features, std::size_t classes, std::vector<double> weights,
                         std::vector<double> bias)
    : features_(features), classes_(classes), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (classes == 0) throw std::invalid_argument("model: at least one class is required");
  if (weights_.size() != features * classes || bias_.size() != classes) {
    throw std::invalid_argument("model: parameter sizes do not match dimensions");
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.size());
  if (logits.empty()) return probs;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    probs[c] = std::exp(logits[c] - top);
    total += probs[c];
  }
  for (double& p : probs) p /= total;
  return probs;
}

Prediction forward(const ModelParams& params, const SparseFeatureVector& x) {
  if (x.indices.size() != x.values.size()) {
    throw std::invalid_argument("forward: index/value length mismatch");
  }
  Prediction pred;
  const auto bias = params.bias();
  pred.logits.assign(bias.begin(), bias.end());
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    const std::uint32_t i = x.indices[k];
    const double v = x.values[k];
    if (i >= params.features()) {
      throw std::invalid_argument("forward: feature index " + std::to_string(i) +
                                  " out of range for " + std::to_string(params.features()) +
                                  " features");
    }
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite feature value");
    const auto row = params.weight_row(i);
    for (std::size_t c = 0; c < row.size(); ++c) pred.logits[c] += v * row[c];
  }
  pred.probs = softmax(pred.logits);
  return pred;
}

ParamGradient backward(const ModelParams& params, const SparseFeatureVector& x,
                       const Prediction& pred, std::span<const double> dl_dyhat) {
  const std::size_t classes = params.classes();
  if (dl_dyhat.size() != classes || pred.probs.size() != classes) {
    throw std::invalid_argument("backward: dimension mismatch");
  }
  // J^T g with J = diag(p) - p p^T (J is symmetric).
  const auto& p = pred.probs;
  double pg = 0.0;
  for (std::size_t c = 0; c < classes; ++c) pg += p[c] * dl_dyhat[c];

  ParamGradient grad;
  grad.bias.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) grad.bias[c] = p[c] * (dl_dyhat[c] - pg);

  grad.rows.assign(x.indices.begin(), x.indices.end());
  grad.row_values.resize(x.indices.size() * classes);
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    for (std::size_t c = 0; c < classes; ++c) {
      grad.row_values[k * classes + c] = x.values[k] * grad.bias[c];
    }
  }
  return grad;
}

std::size_t predict_label(const Prediction& pred) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < pred.probs.size(); ++c) {
    if (pred.probs[c] > pred.probs[best]) best = c;
  }
  return best;
}

namespace {

void write_row(std::ostream& out, std::span<const double> row) {
  char buf[32];
  for (std::size_t c = 0; c < row.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%.17g", row[c]);
    if (c) out << ' ';
    out << buf;
  }
  out << '\n';
}

std::vector<double> read_row(std::istream& in, std::size_t width, std::size_t line_no) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("checkpoint: unexpected end of file at line " + std::to_string(line_no));
  }
  std::istringstream fields(line);
  std::vector<double> row;
  row.reserve(width);
  std::string tok;
  while (fields >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
      throw DataError("checkpoint: bad number '" + tok + "' at line " + std::to_string(line_no));
    }
    row.push_back(v);
  }
  if (row.size() != width) {
    throw DataError("checkpoint: expected " + std::to_string(width) + " values at line " +
                    std::to_string(line_no) + ", found " + std::to_string(row.size()));
  }
  return row;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& params) {
  out << params.features() << ' ' << params.classes() << '\n';
  for (std::size_t i = 0; i < params.features(); ++i) write_row(out, params.weight_row(i));
  write_row(out, params.bias());
}

ModelParams read_checkpoint(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("checkpoint: empty file");
  std::istringstream hs(header);
  long long n = -1;
  long long c = -1;
  std::string extra;
  if (!(hs >> n >> c) || (hs >> extra) || n < 0 || c <= 0) {
    throw DataError("checkpoint: line 1 must be 'N C' with N >= 0 and C > 0");
  }
  const auto features = static_cast<std::size_t>(n);
  const auto classes = static_cast<std::size_t>(c);
  std::vector<double> weights;
  weights.reserve(features * classes);
  for (std::size_t i = 0; i < features; ++i) {
    const auto row = read_row(in, classes, i + 2);
    weights.insert(weights.end(), row.begin(), row.end());
  }
  auto bias = read_row(in, classes, features + 2);
  return ModelParams(features, classes, std::move(weights), std::move(bias));
}

}  // namespace ensloss
