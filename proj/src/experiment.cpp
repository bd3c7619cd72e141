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

#include "ensloss/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "ensloss/errors.hpp"
#include "ensloss/noise.hpp"
#include "ensloss/rng.hpp"

namespace ensloss {

const std::vector<std::string_view>& run_setting_keys() {
  static const std::vector<std::string_view> keys{
      "epochs", "lr_theta", "lr_lambda", "batch_size",       "eta1",      "eta2",
      "lambda_init", "shuffle", "reduction", "sigma", "correntropy_form", "max_vocab",
      "min_doc_freq"};
  return keys;
}

void apply_run_settings(const ConfigMap& cfg, RunSettings& s) {
  auto& t = s.train;
  if (cfg.contains("epochs")) t.epochs = cfg.get_size("epochs");
  if (cfg.contains("lr_theta")) t.lr_theta = cfg.get_double("lr_theta");
  if (cfg.contains("lr_lambda")) t.lr_lambda = cfg.get_double("lr_lambda");
  if (cfg.contains("batch_size")) {
    if (cfg.get_string("batch_size") == "auto") {
      t.batch_size.reset();
    } else {
      t.batch_size = cfg.get_size("batch_size");
    }
  }
  if (cfg.contains("eta1")) t.penalty.eta1 = cfg.get_double("eta1");
  if (cfg.contains("eta2")) t.penalty.eta2 = cfg.get_double("eta2");
  if (cfg.contains("lambda_init")) {
    if (cfg.get_string("lambda_init") == "uniform") {
      t.lambda_init.reset();
    } else {
      t.lambda_init = cfg.get_double_list("lambda_init");
    }
  }
  if (cfg.contains("shuffle")) t.shuffle_each_epoch = cfg.get_bool("shuffle");
  if (cfg.contains("reduction")) {
    const auto r = cfg.get_string("reduction");
    if (r == "mean") {
      t.reduction = Reduction::Mean;
    } else if (r == "sum") {
      t.reduction = Reduction::Sum;
    } else {
      throw ConfigError(cfg.source() + ":" + std::to_string(cfg.entries().at("reduction").line) +
                        ": reduction must be 'mean' or 'sum'");
    }
  }
  if (cfg.contains("sigma")) s.sigma = cfg.get_double("sigma");
  if (cfg.contains("correntropy_form")) {
    const auto form = parse_correntropy_form(cfg.get_string("correntropy_form"));
    if (!form) {
      throw ConfigError(cfg.source() + ":" +
                        std::to_string(cfg.entries().at("correntropy_form").line) +
                        ": correntropy_form must be 'canonical' or 'as_written'");
    }
    s.correntropy_form = *form;
  }
  if (cfg.contains("max_vocab")) s.max_vocab = cfg.get_size("max_vocab");
  if (cfg.contains("min_doc_freq")) s.min_doc_freq = cfg.get_size("min_doc_freq");
}

namespace {

LossSpec make_spec(LossKind kind, const RunSettings& settings) {
  return LossSpec{kind, settings.sigma, settings.correntropy_form};
}

LossKind parse_kind_or_throw(std::string_view name) {
  const auto kind = parse_loss_kind(name);
  if (!kind) throw ConfigError("contender: unknown loss '" + std::string(name) + "'");
  return *kind;
}

}  // namespace

Contender parse_contender(std::string_view text, const RunSettings& settings) {
  Contender c{std::string(text), {}};
  if (text == "ensemble") {
    for (LossKind k : {LossKind::Correntropy, LossKind::Hinge, LossKind::CrossEntropyMargin}) {
      c.losses.push_back(make_spec(k, settings));
    }
  } else if (text.starts_with("ensemble(") && text.ends_with(")")) {
    auto inner = text.substr(9, text.size() - 10);
    while (!inner.empty()) {
      const auto plus = inner.find('+');
      c.losses.push_back(make_spec(parse_kind_or_throw(inner.substr(0, plus)), settings));
      if (plus == std::string_view::npos) break;
      inner.remove_prefix(plus + 1);
      if (inner.empty()) throw ConfigError("contender: trailing '+' in '" + c.name + "'");
    }
    if (c.losses.empty()) throw ConfigError("contender: empty ensemble '" + c.name + "'");
  } else {
    c.losses.push_back(make_spec(parse_kind_or_throw(text), settings));
  }
  for (const auto& spec : c.losses) {
    if (!is_differentiable(spec.kind)) {
      throw ConfigError("contender: '" + c.name + "' uses non-differentiable loss " +
                        std::string(loss_name(spec.kind)));
    }
  }
  return c;
}

void ExperimentPlan::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction: must lie in (0, 1)");
  }
  if (noise_rates.empty()) throw ConfigError("rates: at least one noise rate is required");
  for (double r : noise_rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("rates: every rate must lie in [0, 1]");
  }
  if (contenders.empty()) throw ConfigError("contenders: at least one contender is required");
  std::set<std::string> seen;
  for (const auto& name : contenders) {
    if (!seen.insert(name).second) throw ConfigError("contenders: duplicate '" + name + "'");
    parse_contender(name, settings);
  }
  try {
    settings.train.validate();
    LossSpec{LossKind::Correntropy, settings.sigma, settings.correntropy_form}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string_view>& experiment_keys() {
  static const std::vector<std::string_view> keys = [] {
    auto k = run_setting_keys();
    for (std::string_view extra : {"corpus", "test_fraction", "rates", "contenders", "seed"}) {
      k.push_back(extra);
    }
    return k;
  }();
  return keys;
}

void apply_experiment_config(const ConfigMap& cfg, ExperimentPlan& plan) {
  cfg.reject_unknown(experiment_keys());
  apply_run_settings(cfg, plan.settings);
  if (cfg.contains("corpus")) plan.corpus_path = cfg.get_string("corpus");
  if (cfg.contains("test_fraction")) plan.test_fraction = cfg.get_double("test_fraction");
  if (cfg.contains("rates")) plan.noise_rates = cfg.get_double_list("rates");
  if (cfg.contains("contenders")) plan.contenders = cfg.get_list("contenders");
  if (cfg.contains("seed")) plan.master_seed = cfg.get_u64("seed");
}

std::uint64_t split_seed(std::uint64_t master) { return derive_seed(master, 0, 0); }

std::uint64_t noise_seed(std::uint64_t master, std::size_t row) {
  return derive_seed(master, row + 1, 0);
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t row, std::size_t col) {
  return derive_seed(master, row + 1, col + 1);
}

PreparedData prepare(const Corpus& corpus, const ExperimentPlan& plan) {
  auto parts = split(corpus, plan.test_fraction, split_seed(plan.master_seed));
  PreparedData data;
  data.vocab = build_vocabulary(parts.train, plan.settings.max_vocab, plan.settings.min_doc_freq);
  data.test = make_dataset(parts.test, data.vocab);
  data.train = std::move(parts.train);
  return data;
}

CellResult run_cell(const PreparedData& data, const ExperimentPlan& plan, std::size_t row,
                    std::size_t col) {
  const double rate = plan.noise_rates.at(row);
  const auto contender = parse_contender(plan.contenders.at(col), plan.settings);
  const auto noisy = inject(data.train, {rate, noise_seed(plan.master_seed, row)});

  TrainConfig config = plan.settings.train;
  config.seed = cell_seed(plan.master_seed, row, col);
  const auto result =
      train(make_dataset(noisy.corpus, data.vocab), EnsembleState::uniform(contender.losses), config);

  CellResult cell;
  cell.seed = config.seed;
  cell.accuracy = evaluate(result.params, data.test);
  cell.final_residual = result.state.constraint_residual();
  cell.mixture = result.state.normalized_weights();
  return cell;
}

ResultsTable run_experiment(const Corpus& corpus, const ExperimentPlan& plan) {
  plan.validate();
  const auto data = prepare(corpus, plan);

  ResultsTable table;
  table.rates = plan.noise_rates;
  table.contenders = plan.contenders;
  table.master_seed = plan.master_seed;
  table.split_seed = split_seed(plan.master_seed);
  table.train_documents = data.train.size();
  table.test_documents = data.test.size();
  table.vocabulary_size = data.vocab.size();
  for (std::size_t r = 0; r < plan.noise_rates.size(); ++r) {
    table.noise_seeds.push_back(noise_seed(plan.master_seed, r));
    auto& row = table.cells.emplace_back();
    for (std::size_t c = 0; c < plan.contenders.size(); ++c) {
      char where[160];
      std::snprintf(where, sizeof where, "experiment cell (rate=%g, contender=%s): ",
                    plan.noise_rates[r], plan.contenders[c].c_str());
      try {
        row.push_back(run_cell(data, plan, r, c));
      } catch (const NumericalError& e) {
        throw NumericalError(where + std::string(e.what()));
      } catch (const DataError& e) {
        throw DataError(where + std::string(e.what()));
      } catch (const ConfigError& e) {
        throw ConfigError(where + std::string(e.what()));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + std::string(e.what()));
      }
    }
  }
  return table;
}

void write_results_tsv(std::ostream& out, const ResultsTable& table) {
  out << "rate\tcontender\taccuracy\tseed\n";
  char buf[64];
  for (std::size_t r = 0; r < table.rates.size(); ++r) {
    for (std::size_t c = 0; c < table.contenders.size(); ++c) {
      const auto& cell = table.cells[r][c];
      std::snprintf(buf, sizeof buf, "%g", table.rates[r]);
      out << buf << '\t' << table.contenders[c] << '\t';
      std::snprintf(buf, sizeof buf, "%.6f", cell.accuracy);
      out << buf << '\t' << cell.seed << '\n';
    }
  }
}

const std::vector<PublishedReference>& published_references() {
  static const std::vector<PublishedReference> refs{
      {"20news", "20-newsgroups", {{0.80, 0.69, 0.82, 0.85}, {0.79, 0.67, 0.69, 0.83}, {0.57, 0.64, 0.55, 0.82}}},
      {"movie", "movie-reviews", {{0.83, 0.81, 0.85, 0.83}, {0.75, 0.74, 0.73, 0.78}, {0.55, 0.54, 0.55, 0.60}}},
      {"trec", "email classification (TREC)", {{0.88, 0.78, 0.96, 0.97}, {0.86, 0.57, 0.82, 0.96}, {0.80, 0.46, 0.81, 0.93}}},
      {"reuters", "Reuters-21578", {{0.79, 0.79, 0.81, 0.81}, {0.76, 0.69, 0.71, 0.73}, {0.64, 0.54, 0.53, 0.68}}},
  };
  return refs;
}

const PublishedReference* find_published_reference(std::string_view key) {
  for (const auto& ref : published_references()) {
    if (ref.key == key) return &ref;
  }
  return nullptr;
}

void write_results_text(std::ostream& out, const ResultsTable& table,
                        const PublishedReference* reference) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# master_seed=%llu split_seed=%llu\n",
                static_cast<unsigned long long>(table.master_seed),
                static_cast<unsigned long long>(table.split_seed));
  out << buf;
  std::snprintf(buf, sizeof buf, "# train=%zu test=%zu vocabulary=%zu\n", table.train_documents,
                table.test_documents, table.vocabulary_size);
  out << buf;
  for (std::size_t r = 0; r < table.rates.size(); ++r) {
    std::snprintf(buf, sizeof buf, "# noise_seed[rate=%g]=%llu\n", table.rates[r],
                  static_cast<unsigned long long>(table.noise_seeds[r]));
    out << buf;
  }

  std::size_t width = 8;
  for (const auto& name : table.contenders) width = std::max(width, name.size() + 2);
  auto pad = [&](const std::string& s) { return s + std::string(width - std::min(width, s.size()), ' '); };

  out << pad("rate");
  for (const auto& name : table.contenders) out << pad(name);
  out << '\n';
  for (std::size_t r = 0; r < table.rates.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.2f", table.rates[r]);
    out << pad(buf);
    for (const auto& cell : table.cells[r]) {
      std::snprintf(buf, sizeof buf, "%.4f", cell.accuracy);
      out << pad(buf);
    }
    out << '\n';
  }

  if (reference) {
    out << "\n# published accuracy, " << reference->dataset << '\n';
    const char* cols[] = {"cross-entropy", "hinge", "square", "ensemble"};
    const char* rates[] = {"0.00", "0.10", "0.30"};
    const std::size_t w = 15;
    auto cell = [&](const std::string& s) { return s + std::string(w - std::min(w, s.size()), ' '); };
    out << cell("rate");
    for (const char* c : cols) out << cell(c);
    out << '\n';
    for (int r = 0; r < 3; ++r) {
      out << cell(rates[r]);
      for (int c = 0; c < 4; ++c) {
        std::snprintf(buf, sizeof buf, "%.2f", reference->accuracy[r][c]);
        out << cell(buf);
      }
      out << '\n';
    }
  }
}

}  // namespace ensloss
