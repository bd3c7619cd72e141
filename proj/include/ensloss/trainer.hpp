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
#include <optional>
#include <span>
#include <vector>

#include "ensloss/ensemble.hpp"
#include "ensloss/model.hpp"
#include "ensloss/text.hpp"

namespace ensloss {

/// Vectorized documents with class indices.
struct Dataset {
  std::vector<SparseFeatureVector> features;
  std::vector<std::size_t> labels;
  std::size_t num_features = 0;
  std::size_t num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

Dataset make_dataset(const Corpus& corpus, const Vocabulary& vocab);

struct TrainConfig {
  double lr_theta = 10.0;
  double lr_lambda = 5e-4;
  std::size_t epochs = 500;
  /// Unset: full batch up to 10000 documents, 256 otherwise.
  std::optional<std::size_t> batch_size;
  PenaltyParams penalty;
  /// Unset: uniform 1/sqrt(M).
  std::optional<std::vector<double>> lambda_init;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  Reduction reduction = Reduction::Mean;

  void validate() const;
  std::size_t resolved_batch_size(std::size_t documents) const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_objective = 0.0;  // mean over the epoch's steps, before each update
  double residual = 0.0;        // sum(lambda^2) - 1 after the epoch
  std::vector<double> lambdas;  // raw lambdas after the epoch
  double train_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::optional<double> test_accuracy;
  double wall_seconds = 0.0;

  /// Equality of everything except wall time.
  bool same_outcome(const TrainReport& other) const {
    return epochs == other.epochs && test_accuracy == other.test_accuracy;
  }
};

/// Tab-separated, one epoch per line after a `#` header.
void write_report(std::ostream& out, const TrainReport& report);

struct TrainResult {
  ModelParams params;
  EnsembleState state;
  TrainReport report;
};

/// Gradient of the batch objective w.r.t. W, b and lambda.
struct ObjectiveGradient {
  double objective = 0.0;
  std::vector<double> weights;             // dense, features x classes
  std::vector<std::uint32_t> touched_rows; // rows of `weights` that may be nonzero
  std::vector<double> bias;
  std::vector<double> lambdas;
};

/// Reduced ensemble loss of the selected documents plus one penalty term.
double batch_objective(const ModelParams& params, const EnsembleState& state,
                       const Dataset& data, std::span<const std::size_t> batch,
                       const PenaltyParams& penalty, Reduction reduction);

ObjectiveGradient batch_gradient(const ModelParams& params, const EnsembleState& state,
                                 const Dataset& data, std::span<const std::size_t> batch,
                                 const PenaltyParams& penalty, Reduction reduction);

/// theta <- theta - lr_theta g_theta and lambda <- lambda - lr_lambda g_lambda,
/// both from gradients at the current point. Returns the pre-update objective.
double descend(ModelParams& params, EnsembleState& state, const Dataset& data,
               std::span<const std::size_t> batch, const TrainConfig& config);

/// Joint gradient descent on (W, b, lambda) from zero-initialized W and b.
/// Throws NumericalError naming the epoch and step when the objective or an
/// updated parameter is not finite.
TrainResult train(const Dataset& data, EnsembleState state, const TrainConfig& config);
TrainResult train(const Corpus& corpus, const Vocabulary& vocab, EnsembleState state,
                  const TrainConfig& config);

/// Fraction of documents whose predicted label equals the true label.
double evaluate(const ModelParams& params, const Dataset& data);
double evaluate(const ModelParams& params, const Corpus& corpus, const Vocabulary& vocab);

}  // namespace ensloss
