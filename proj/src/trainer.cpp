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

#include "ensloss/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ensloss/errors.hpp"
#include "ensloss/rng.hpp"

namespace ensloss {

Dataset make_dataset(const Corpus& corpus, const Vocabulary& vocab) {
  Dataset data;
  data.num_features = vocab.size();
  data.num_classes = corpus.num_classes();
  data.features.reserve(corpus.size());
  data.labels.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    data.features.push_back(vectorize(vocab, doc.text));
    data.labels.push_back(doc.label);
  }
  return data;
}

void TrainConfig::validate() const {
  if (!(lr_theta > 0.0) || !std::isfinite(lr_theta)) {
    throw std::invalid_argument("train: lr_theta must be positive");
  }
  if (!(lr_lambda > 0.0) || !std::isfinite(lr_lambda)) {
    throw std::invalid_argument("train: lr_lambda must be positive");
  }
  if (batch_size && *batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");
  penalty.validate();
}

std::size_t TrainConfig::resolved_batch_size(std::size_t documents) const {
  if (batch_size) return *batch_size;
  return documents <= 10000 ? std::max<std::size_t>(documents, 1) : 256;
}

void write_report(std::ostream& out, const TrainReport& report) {
  out << "# epoch\tmean_objective\tresidual\ttrain_accuracy\tlambdas\n";
  char buf[64];
  for (const auto& rec : report.epochs) {
    out << rec.epoch;
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\t%.6f\t", rec.mean_objective, rec.residual,
                  rec.train_accuracy);
    out << buf;
    for (std::size_t j = 0; j < rec.lambdas.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", rec.lambdas[j]);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
  if (report.test_accuracy) {
    std::snprintf(buf, sizeof buf, "# test_accuracy=%.6f\n", *report.test_accuracy);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# wall_seconds=%.3f\n", report.wall_seconds);
  out << buf;
}

namespace {

void check_compatible(const ModelParams& params, const EnsembleState& state, const Dataset& data) {
  if (params.features() != data.num_features || params.classes() != data.num_classes) {
    throw std::invalid_argument("train: model dimensions do not match the dataset");
  }
  if (!state.all_differentiable()) {
    throw std::invalid_argument("train: every weak loss must be differentiable");
  }
}

}  // namespace

double batch_objective(const ModelParams& params, const EnsembleState& state,
                       const Dataset& data, std::span<const std::size_t> batch,
                       const PenaltyParams& penalty_params, Reduction reduction) {
  if (batch.empty()) throw std::invalid_argument("batch_objective: empty batch");
  double total = 0.0;
  for (std::size_t idx : batch) {
    const auto pred = forward(params, data.features[idx]);
    const auto y = one_hot(data.labels[idx], data.num_classes);
    total += ensemble_loss(state, y, pred.probs);
  }
  if (reduction == Reduction::Mean) total /= static_cast<double>(batch.size());
  return total + penalty(state, penalty_params);
}

ObjectiveGradient batch_gradient(const ModelParams& params, const EnsembleState& state,
                                 const Dataset& data, std::span<const std::size_t> batch,
                                 const PenaltyParams& penalty_params, Reduction reduction) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  check_compatible(params, state, data);
  const std::size_t classes = params.classes();
  const double scale =
      reduction == Reduction::Mean ? 1.0 / static_cast<double>(batch.size()) : 1.0;

  ObjectiveGradient g;
  g.weights.assign(params.weights().size(), 0.0);
  g.bias.assign(classes, 0.0);
  std::vector<double> loss_totals(state.size(), 0.0);
  std::vector<char> touched(params.features(), 0);
  const auto mix = state.mixture_weights();

  double data_term = 0.0;
  for (std::size_t idx : batch) {
    const auto& x = data.features[idx];
    const auto pred = forward(params, x);
    const auto y = one_hot(data.labels[idx], classes);
    const auto values = weak_loss_values(state, y, pred.probs);
    for (std::size_t j = 0; j < values.size(); ++j) {
      loss_totals[j] += values[j];
      data_term += mix[j] * values[j];
    }
    auto upstream = grad_yhat_ensemble(state, y, pred.probs);
    for (double& v : upstream) v *= scale;
    const auto pg = backward(params, x, pred, upstream);
    for (std::size_t c = 0; c < classes; ++c) g.bias[c] += pg.bias[c];
    for (std::size_t k = 0; k < pg.rows.size(); ++k) {
      const std::uint32_t row = pg.rows[k];
      touched[row] = 1;
      double* dst = g.weights.data() + row * classes;
      const double* src = pg.row_values.data() + k * classes;
      for (std::size_t c = 0; c < classes; ++c) dst[c] += src[c];
    }
  }
  for (double& t : loss_totals) t *= scale;
  g.objective = data_term * scale + penalty(state, penalty_params);
  g.lambdas = grad_lambda_from_totals(state, penalty_params, loss_totals);
  for (std::uint32_t i = 0; i < touched.size(); ++i) {
    if (touched[i]) g.touched_rows.push_back(i);
  }
  return g;
}

double descend(ModelParams& params, EnsembleState& state, const Dataset& data,
               std::span<const std::size_t> batch, const TrainConfig& config) {
  const auto g =
      batch_gradient(params, state, data, batch, config.penalty, config.reduction);
  const std::size_t classes = params.classes();
  for (std::uint32_t row : g.touched_rows) {
    auto w = params.weight_row(row);
    const double* grow = g.weights.data() + row * classes;
    for (std::size_t c = 0; c < classes; ++c) w[c] -= config.lr_theta * grow[c];
  }
  auto bias = params.bias();
  for (std::size_t c = 0; c < classes; ++c) bias[c] -= config.lr_theta * g.bias[c];

  std::vector<double> lambdas(state.lambdas().begin(), state.lambdas().end());
  for (std::size_t j = 0; j < lambdas.size(); ++j) lambdas[j] -= config.lr_lambda * g.lambdas[j];
  for (double v : lambdas) {
    if (!std::isfinite(v)) throw NumericalError("train: lambda became non-finite");
  }
  state.set_lambdas(std::move(lambdas));
  return g.objective;
}

TrainResult train(const Dataset& data, EnsembleState state, const TrainConfig& config) {
  config.validate();
  if (data.size() == 0) throw DataError("train: empty training corpus");
  if (config.lambda_init) state.set_lambdas(*config.lambda_init);

  TrainResult result{ModelParams(data.num_features, data.num_classes), std::move(state), {}};
  check_compatible(result.params, result.state, data);
  const auto started = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  const std::size_t batch = config.resolved_batch_size(data.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) rng.shuffle(std::span<std::size_t>(order));
    double objective_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const std::span<const std::size_t> indices(order.data() + start, stop - start);
      ++steps;
      const std::string where = " at epoch " + std::to_string(epoch) + ", step " + std::to_string(steps);
      double objective = 0.0;
      try {
        objective = descend(result.params, result.state, data, indices, config);
      } catch (const NumericalError& e) {
        throw NumericalError(e.what() + where);
      }
      if (!std::isfinite(objective)) throw NumericalError("train: non-finite objective" + where);
      objective_sum += objective;
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(result.params.weights().begin(), result.params.weights().end(), finite) ||
        !std::all_of(result.params.bias().begin(), result.params.bias().end(), finite)) {
      throw NumericalError("train: non-finite parameter after epoch " + std::to_string(epoch));
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_objective = objective_sum / static_cast<double>(steps);
    rec.residual = result.state.constraint_residual();
    rec.lambdas.assign(result.state.lambdas().begin(), result.state.lambdas().end());
    rec.train_accuracy = evaluate(result.params, data);
    result.report.epochs.push_back(std::move(rec));
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

TrainResult train(const Corpus& corpus, const Vocabulary& vocab, EnsembleState state,
                  const TrainConfig& config) {
  return train(make_dataset(corpus, vocab), std::move(state), config);
}

double evaluate(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) throw DataError("evaluate: empty corpus");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict_label(forward(params, data.features[i])) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate(const ModelParams& params, const Corpus& corpus, const Vocabulary& vocab) {
  return evaluate(params, make_dataset(corpus, vocab));
}

}  // namespace ensloss
