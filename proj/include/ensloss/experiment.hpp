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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ensloss/config.hpp"
#include "ensloss/loss.hpp"
#include "ensloss/text.hpp"
#include "ensloss/trainer.hpp"

namespace ensloss {

/// Training and featurization settings shared by `train` and `experiment`.
struct RunSettings {
  TrainConfig train;
  double sigma = 1.0;
  CorrentropyForm correntropy_form = CorrentropyForm::Canonical;
  std::size_t max_vocab = kDefaultMaxVocabulary;
  std::size_t min_doc_freq = kDefaultMinDocFreq;
};

/// Config keys understood by apply_run_settings.
const std::vector<std::string_view>& run_setting_keys();
void apply_run_settings(const ConfigMap& cfg, RunSettings& settings);

/// A named set of weak losses trained as one model.
struct Contender {
  std::string name;
  std::vector<LossSpec> losses;
};

/// "hinge", "ce_margin", ... for a single loss; "ensemble" for the default
/// Correntropy + Hinge + margin cross-entropy set; "ensemble(a+b+...)" for a
/// custom set. Throws ConfigError on unknown names.
Contender parse_contender(std::string_view text, const RunSettings& settings);

struct ExperimentPlan {
  std::filesystem::path corpus_path;
  double test_fraction = 0.2;
  std::vector<double> noise_rates{0.0, 0.1, 0.3};
  std::vector<std::string> contenders{"ce_margin", "hinge", "square", "ensemble"};
  RunSettings settings;
  std::uint64_t master_seed = 0;

  /// Throws ConfigError for out-of-range rates, duplicate or unknown
  /// contenders, or a bad test fraction.
  void validate() const;
};

const std::vector<std::string_view>& experiment_keys();
void apply_experiment_config(const ConfigMap& cfg, ExperimentPlan& plan);

// Seed derivation from the master seed (see README):
//   split       derive_seed(master, 0, 0)
//   noise row r derive_seed(master, r + 1, 0)
//   cell (r, c) derive_seed(master, r + 1, c + 1)
std::uint64_t split_seed(std::uint64_t master);
std::uint64_t noise_seed(std::uint64_t master, std::size_t row);
std::uint64_t cell_seed(std::uint64_t master, std::size_t row, std::size_t col);

/// The held-out split exists only in vectorized form, so it cannot be handed
/// to label-noise injection. The vocabulary is built from `train` alone.
struct PreparedData {
  Corpus train;
  Dataset test;
  Vocabulary vocab;
};

PreparedData prepare(const Corpus& corpus, const ExperimentPlan& plan);

struct CellResult {
  double accuracy = 0.0;
  std::uint64_t seed = 0;
  double final_residual = 0.0;
  std::vector<double> mixture;  // normalized lambda^2 shares
};

/// Trains one contender on the noisy training split of one rate row.
CellResult run_cell(const PreparedData& data, const ExperimentPlan& plan, std::size_t row,
                    std::size_t col);

struct ResultsTable {
  std::vector<double> rates;
  std::vector<std::string> contenders;
  std::vector<std::vector<CellResult>> cells;  // [rate][contender]
  std::uint64_t master_seed = 0;
  std::uint64_t split_seed = 0;
  std::vector<std::uint64_t> noise_seeds;
  std::size_t train_documents = 0;
  std::size_t test_documents = 0;
  std::size_t vocabulary_size = 0;
};

/// Runs every (rate, contender) cell. A failing cell is rethrown with its
/// rate and contender in the message, preserving the exception type.
ResultsTable run_experiment(const Corpus& corpus, const ExperimentPlan& plan);

/// Header `rate<TAB>contender<TAB>accuracy<TAB>seed`, one line per cell.
void write_results_tsv(std::ostream& out, const ResultsTable& table);

/// Published accuracies for one dataset, columns cross-entropy, hinge,
/// square, ensemble; rows clean, 10% and 30% label noise.
struct PublishedReference {
  std::string_view key;
  std::string_view dataset;
  double accuracy[3][4];
};

const std::vector<PublishedReference>& published_references();
const PublishedReference* find_published_reference(std::string_view key);

/// Aligned table plus run metadata; with `reference`, the published numbers
/// are printed underneath.
void write_results_text(std::ostream& out, const ResultsTable& table,
                        const PublishedReference* reference = nullptr);

}  // namespace ensloss
