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
#include <iosfwd>
#include <span>
#include <vector>

namespace ensloss {

/// Sparse document representation: strictly increasing term indices with
/// positive values.
struct SparseFeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }

  friend bool operator==(const SparseFeatureVector&, const SparseFeatureVector&) = default;
};

/// Linear layer W (features x classes, row-major) and bias b.
class ModelParams {
 public:
  ModelParams() = default;
  /// Zero-initialized parameters.
  ModelParams(std::size_t features, std::size_t classes);
  ModelParams(std::size_t features, std::size_t classes, std::vector<double> weights,
              std::vector<double> bias);

  std::size_t features() const noexcept { return features_; }
  std::size_t classes() const noexcept { return classes_; }

  double& weight(std::size_t feature, std::size_t cls) { return weights_[feature * classes_ + cls]; }
  double weight(std::size_t feature, std::size_t cls) const {
    return weights_[feature * classes_ + cls];
  }
  std::span<double> weight_row(std::size_t feature) {
    return {weights_.data() + feature * classes_, classes_};
  }
  std::span<const double> weight_row(std::size_t feature) const {
    return {weights_.data() + feature * classes_, classes_};
  }

  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> bias() noexcept { return bias_; }
  std::span<const double> bias() const noexcept { return bias_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t features_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probs;
};

/// Gradient of a scalar loss w.r.t. the parameters for one sample. Only the
/// rows of W touched by the sample's nonzero features are stored.
struct ParamGradient {
  std::vector<std::uint32_t> rows;
  std::vector<double> row_values;  // rows.size() x classes, row-major
  std::vector<double> bias;
};

/// Softmax with max-subtraction.
std::vector<double> softmax(std::span<const double> logits);

/// logits = x W + b, probs = softmax(logits).
/// Throws std::invalid_argument for out-of-range indices or non-finite values.
Prediction forward(const ModelParams& params, const SparseFeatureVector& x);

/// Chain rule through softmax: dlogits = (diag(p) - p p^T) dL_dyhat,
/// dW[i, :] = x[i] dlogits, db = dlogits.
ParamGradient backward(const ModelParams& params, const SparseFeatureVector& x,
                       const Prediction& pred, std::span<const double> dl_dyhat);

/// Argmax of the probabilities; ties go to the lowest class index.
std::size_t predict_label(const Prediction& pred);

/// Text checkpoint: "N C", N rows of C weights, one row of C biases, all
/// printed with 17 significant digits.
void write_checkpoint(std::ostream& out, const ModelParams& params);
/// Throws DataError on malformed input.
ModelParams read_checkpoint(std::istream& in);

}  // namespace ensloss
