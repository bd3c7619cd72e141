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

// ensloss: train and evaluate linear-softmax text classifiers with a
// learned ensemble of weak losses.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ensloss/config.hpp"
#include "ensloss/errors.hpp"
#include "ensloss/experiment.hpp"
#include "ensloss/gradient_suite.hpp"
#include "ensloss/noise.hpp"
#include "ensloss/synthetic.hpp"
#include "ensloss/text.hpp"
#include "ensloss/trainer.hpp"

namespace {

using namespace ensloss;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Flags that override RunSettings. Values are only applied when given.
struct RunFlags {
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* lr_theta_opt = nullptr;
  CLI::Option* lr_lambda_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
  CLI::Option* eta1_opt = nullptr;
  CLI::Option* eta2_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* form_opt = nullptr;
  CLI::Option* reduction_opt = nullptr;
  CLI::Option* max_vocab_opt = nullptr;
  CLI::Option* min_df_opt = nullptr;
  std::size_t epochs = 0;
  double lr_theta = 0.0;
  double lr_lambda = 0.0;
  std::string batch;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double sigma = 0.0;
  std::string form;
  std::string reduction;
  std::size_t max_vocab = 0;
  std::size_t min_df = 0;

  void attach(CLI::App* app) {
    epochs_opt = app->add_option("--epochs", epochs, "Training epochs");
    lr_theta_opt = app->add_option("--lr-theta", lr_theta, "Learning rate for W and b");
    lr_lambda_opt = app->add_option("--lr-lambda", lr_lambda, "Learning rate for lambda");
    batch_opt = app->add_option("--batch-size", batch, "Minibatch size or 'auto'");
    eta1_opt = app->add_option("--eta1", eta1, "Linear penalty coefficient");
    eta2_opt = app->add_option("--eta2", eta2, "Quadratic penalty coefficient");
    sigma_opt = app->add_option("--sigma", sigma, "Correntropy kernel width");
    form_opt = app->add_option("--correntropy-form", form, "canonical or as_written");
    reduction_opt = app->add_option("--reduction", reduction, "mean or sum over a batch");
    max_vocab_opt = app->add_option("--max-vocab", max_vocab, "Vocabulary size cap");
    min_df_opt = app->add_option("--min-doc-freq", min_df, "Minimum document frequency");
  }

  void apply(RunSettings& s) const {
    auto& t = s.train;
    if (*epochs_opt) t.epochs = epochs;
    if (*lr_theta_opt) t.lr_theta = lr_theta;
    if (*lr_lambda_opt) t.lr_lambda = lr_lambda;
    if (*batch_opt) {
      if (batch == "auto") {
        t.batch_size.reset();
      } else {
        t.batch_size = parse_size_field("--batch-size", batch);
      }
    }
    if (*eta1_opt) t.penalty.eta1 = eta1;
    if (*eta2_opt) t.penalty.eta2 = eta2;
    if (*sigma_opt) s.sigma = sigma;
    if (*form_opt) {
      const auto f = parse_correntropy_form(form);
      if (!f) throw ConfigError("--correntropy-form: expected canonical or as_written");
      s.correntropy_form = *f;
    }
    if (*reduction_opt) {
      if (reduction == "mean") {
        t.reduction = Reduction::Mean;
      } else if (reduction == "sum") {
        t.reduction = Reduction::Sum;
      } else {
        throw ConfigError("--reduction: expected mean or sum");
      }
    }
    if (*max_vocab_opt) s.max_vocab = max_vocab;
    if (*min_df_opt) s.min_doc_freq = min_df;
  }
};

void write_vectors(std::ostream& out, const Corpus& corpus, const Vocabulary& vocab) {
  char buf[48];
  for (const auto& doc : corpus.documents) {
    out << corpus.class_names[doc.label] << '\t';
    const auto x = vectorize(vocab, doc.text);
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%u:%.17g", x.indices[k], x.values[k]);
      out << (k ? " " : "") << buf;
    }
    out << '\n';
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

int run(int argc, char** argv) {
  CLI::App app{"Ensemble-loss text classification"};
  app.require_subcommand(1);

  // vectorize
  auto* vec = app.add_subcommand("vectorize", "Turn a corpus into relative-frequency vectors");
  std::string vec_corpus, vec_vocab_in, vec_vocab_out, vec_out, vec_config;
  RunFlags vec_flags;
  vec->add_option("--corpus", vec_corpus, "Corpus file (label<TAB>text)")->required();
  vec->add_option("--vocab", vec_vocab_in, "Existing vocabulary file");
  vec->add_option("--vocab-out", vec_vocab_out, "Write the vocabulary here");
  vec->add_option("--out", vec_out, "Output vectors (label<TAB>idx:value ...)")->required();
  vec->add_option("--config", vec_config, "Config file");
  vec_flags.max_vocab_opt = vec->add_option("--max-vocab", vec_flags.max_vocab, "Vocabulary size cap");
  vec_flags.min_df_opt = vec->add_option("--min-doc-freq", vec_flags.min_df, "Minimum document frequency");

  // train
  auto* tr = app.add_subcommand("train", "Train a model on a corpus");
  std::string tr_corpus, tr_out, tr_config, tr_losses;
  std::uint64_t tr_seed = 0;
  RunFlags tr_flags;
  tr->add_option("--corpus", tr_corpus, "Training corpus");
  tr->add_option("--out", tr_out, "Checkpoint path; sidecars use it as prefix")->required();
  tr->add_option("--config", tr_config, "Config file");
  auto* tr_seed_opt = tr->add_option("--seed", tr_seed, "Shuffle seed");
  auto* tr_losses_opt = tr->add_option("--losses", tr_losses, "Contender, e.g. ensemble or hinge");
  tr_flags.attach(tr);

  // eval
  auto* ev = app.add_subcommand("eval", "Accuracy of a checkpoint on a corpus");
  std::string ev_model, ev_corpus, ev_vocab, ev_classes, ev_out;
  ev->add_option("--model", ev_model, "Checkpoint from `train`")->required();
  ev->add_option("--corpus", ev_corpus, "Corpus to score")->required();
  ev->add_option("--vocab", ev_vocab, "Vocabulary (default <model>.vocab)");
  ev->add_option("--classes", ev_classes, "Class names (default <model>.classes)");
  ev->add_option("--out", ev_out, "Also write the result line here");

  // noise
  auto* nz = app.add_subcommand("noise", "Inject symmetric label noise");
  std::string nz_corpus, nz_out, nz_flipped;
  double nz_rate = 0.0;
  std::uint64_t nz_seed = 0;
  nz->add_option("--corpus", nz_corpus, "Input corpus")->required();
  nz->add_option("--rate", nz_rate, "Fraction of labels to change")->required();
  nz->add_option("--seed", nz_seed, "Noise seed");
  nz->add_option("--out", nz_out, "Output corpus")->required();
  nz->add_option("--flipped-out", nz_flipped, "Write flipped document indices here");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  GradientSuiteOptions gc_opts;
  std::string gc_out;
  gc->add_option("--seed", gc_opts.seed, "Random configuration seed");
  gc->add_option("--configs", gc_opts.configurations, "Configurations per block");
  gc->add_option("--step", gc_opts.fd.step, "Finite-difference step");
  gc->add_option("--rel-tol", gc_opts.rel_tol, "Relative tolerance");
  gc->add_option("--abs-tol", gc_opts.abs_tol, "Absolute tolerance");
  gc->add_option("--out", gc_out, "Also write the report here");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Noise-rate x contender accuracy table");
  std::string ex_config, ex_corpus, ex_out, ex_rates, ex_contenders, ex_reference;
  double ex_fraction = 0.2;
  std::uint64_t ex_seed = 0;
  RunFlags ex_flags;
  ex->add_option("--config", ex_config, "Experiment config file");
  auto* ex_corpus_opt = ex->add_option("--corpus", ex_corpus, "Corpus file");
  auto* ex_rates_opt = ex->add_option("--rates", ex_rates, "Comma-separated noise rates");
  auto* ex_cont_opt = ex->add_option("--contenders", ex_contenders, "Comma-separated contenders");
  auto* ex_frac_opt = ex->add_option("--test-fraction", ex_fraction, "Held-out fraction");
  auto* ex_seed_opt = ex->add_option("--seed", ex_seed, "Master seed");
  ex->add_option("--out", ex_out, "Output prefix: writes <out>.tsv and <out>.txt");
  ex->add_option("--reference", ex_reference, "Print published numbers: 20news, movie, trec, reuters");
  ex_flags.attach(ex);

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a synthetic corpus");
  SyntheticSpec sy_spec;
  std::string sy_out;
  sy->add_option("--documents", sy_spec.documents, "Number of documents");
  sy->add_option("--vocabulary", sy_spec.vocabulary, "Number of distinct words");
  sy->add_option("--classes", sy_spec.classes, "Number of classes");
  sy->add_option("--min-length", sy_spec.min_length, "Minimum tokens per document");
  sy->add_option("--max-length", sy_spec.max_length, "Maximum tokens per document");
  sy->add_option("--separation", sy_spec.separation, "Class-conditional tilt strength");
  sy->add_option("--seed", sy_spec.seed, "Generator seed");
  sy->add_option("--out", sy_out, "Output corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*vec) {
    RunSettings settings;
    if (!vec_config.empty()) {
      const auto cfg = ConfigMap::parse_file(vec_config);
      cfg.reject_unknown({"max_vocab", "min_doc_freq"});
      apply_run_settings(cfg, settings);
    }
    if (*vec_flags.max_vocab_opt) settings.max_vocab = vec_flags.max_vocab;
    if (*vec_flags.min_df_opt) settings.min_doc_freq = vec_flags.min_df;
    const auto corpus = read_corpus_file(vec_corpus);
    Vocabulary vocab;
    if (vec_vocab_in.empty()) {
      vocab = build_vocabulary(corpus, settings.max_vocab, settings.min_doc_freq);
    } else {
      auto in = open_input(vec_vocab_in);
      vocab = read_vocabulary(in);
    }
    auto out = open_output(vec_out);
    write_vectors(out, corpus, vocab);
    if (!vec_vocab_out.empty()) {
      auto vout = open_output(vec_vocab_out);
      write_vocabulary(vout, vocab);
    }
    std::cout << "documents=" << corpus.size() << " vocabulary=" << vocab.size() << '\n';
    return kExitOk;
  }

  if (*tr) {
    RunSettings settings;
    std::string contender = "ensemble";
    std::string corpus_path = tr_corpus;
    std::uint64_t seed = 0;
    if (!tr_config.empty()) {
      const auto cfg = ConfigMap::parse_file(tr_config);
      auto known = run_setting_keys();
      known.insert(known.end(), {"corpus", "losses", "seed"});
      cfg.reject_unknown(known);
      apply_run_settings(cfg, settings);
      if (cfg.contains("corpus") && corpus_path.empty()) corpus_path = cfg.get_string("corpus");
      if (cfg.contains("losses")) contender = cfg.get_string("losses");
      if (cfg.contains("seed")) seed = cfg.get_u64("seed");
    }
    tr_flags.apply(settings);
    if (*tr_losses_opt) contender = tr_losses;
    if (*tr_seed_opt) seed = tr_seed;
    if (corpus_path.empty()) throw ConfigError("train: --corpus (or corpus in the config) is required");
    settings.train.seed = seed;

    const auto parsed = parse_contender(contender, settings);
    const auto corpus = read_corpus_file(corpus_path);
    const auto vocab = build_vocabulary(corpus, settings.max_vocab, settings.min_doc_freq);
    const auto result = train(corpus, vocab, EnsembleState::uniform(parsed.losses), settings.train);

    {
      auto out = open_output(tr_out);
      write_checkpoint(out, result.params);
    }
    {
      auto out = open_output(tr_out + ".lambda");
      out << "lambda:";
      for (double l : result.state.lambdas()) out << ' ' << format_double("%.17g", l);
      out << '\n';
    }
    {
      auto out = open_output(tr_out + ".vocab");
      write_vocabulary(out, vocab);
    }
    {
      auto out = open_output(tr_out + ".classes");
      for (const auto& name : corpus.class_names) out << name << '\n';
    }
    {
      auto out = open_output(tr_out + ".report.tsv");
      write_report(out, result.report);
    }
    const double train_acc =
        result.report.epochs.empty() ? evaluate(result.params, corpus, vocab)
                                     : result.report.epochs.back().train_accuracy;
    std::cout << "contender=" << parsed.name << " epochs=" << result.report.epochs.size()
              << " train_accuracy=" << format_double("%.4f", train_acc)
              << " residual=" << format_double("%.6f", result.state.constraint_residual())
              << " weights=";
    const auto shares = result.state.normalized_weights();
    for (std::size_t j = 0; j < shares.size(); ++j) {
      std::cout << (j ? "," : "") << loss_name(parsed.losses[j].kind) << ':'
                << format_double("%.4f", shares[j]);
    }
    std::cout << '\n';
    return kExitOk;
  }

  if (*ev) {
    const std::string vocab_path = ev_vocab.empty() ? ev_model + ".vocab" : ev_vocab;
    const std::string classes_path = ev_classes.empty() ? ev_model + ".classes" : ev_classes;
    auto min = open_input(ev_model);
    const auto params = read_checkpoint(min);
    auto vin = open_input(vocab_path);
    const auto vocab = read_vocabulary(vin);
    const auto classes = read_lines(classes_path);
    if (vocab.size() != params.features() || classes.size() != params.classes()) {
      throw DataError("eval: checkpoint dimensions do not match vocabulary/classes files");
    }
    const auto corpus = read_corpus_file(ev_corpus, &classes);
    const std::string line = "accuracy=" + format_double("%.4f", evaluate(params, corpus, vocab));
    std::cout << line << '\n';
    if (!ev_out.empty()) open_output(ev_out) << line << '\n';
    return kExitOk;
  }

  if (*nz) {
    const auto corpus = read_corpus_file(nz_corpus);
    const auto noisy = inject(corpus, {nz_rate, nz_seed});
    {
      auto out = open_output(nz_out);
      write_corpus(out, noisy.corpus);
    }
    if (!nz_flipped.empty()) {
      auto out = open_output(nz_flipped);
      for (std::size_t i : noisy.flipped) out << i << '\n';
    }
    std::cout << "documents=" << corpus.size() << " flipped=" << noisy.flipped.size() << '\n';
    return kExitOk;
  }

  if (*gc) {
    const auto blocks = run_gradient_suite(gc_opts);
    std::ostringstream report;
    bool all = true;
    for (const auto& b : blocks) {
      report << (b.pass() ? "PASS " : "FAIL ") << b.name << " configs=" << b.configurations
             << " failures=" << b.failures
             << " max_rel_error=" << format_double("%.3e", b.max_rel_error) << '\n';
      all = all && b.pass();
    }
    std::cout << report.str();
    if (!gc_out.empty()) open_output(gc_out) << report.str();
    return all ? kExitOk : kExitNumerical;
  }

  if (*ex) {
    ExperimentPlan plan;
    if (!ex_config.empty()) apply_experiment_config(ConfigMap::parse_file(ex_config), plan);
    ex_flags.apply(plan.settings);
    if (*ex_corpus_opt) plan.corpus_path = ex_corpus;
    if (*ex_rates_opt) {
      plan.noise_rates.clear();
      for (const auto& r : split_list(ex_rates)) plan.noise_rates.push_back(parse_double_field("--rates", r));
    }
    if (*ex_cont_opt) plan.contenders = split_list(ex_contenders);
    if (*ex_frac_opt) plan.test_fraction = ex_fraction;
    if (*ex_seed_opt) plan.master_seed = ex_seed;
    if (plan.corpus_path.empty()) throw ConfigError("experiment: --corpus (or corpus in the config) is required");
    const PublishedReference* reference = nullptr;
    if (!ex_reference.empty()) {
      reference = find_published_reference(ex_reference);
      if (!reference) throw ConfigError("--reference: unknown dataset '" + ex_reference + "'");
    }
    plan.validate();

    const auto corpus = read_corpus_file(plan.corpus_path);
    const auto table = run_experiment(corpus, plan);
    write_results_text(std::cout, table, reference);
    if (!ex_out.empty()) {
      auto tsv = open_output(ex_out + ".tsv");
      write_results_tsv(tsv, table);
      auto txt = open_output(ex_out + ".txt");
      write_results_text(txt, table, reference);
    }
    return kExitOk;
  }

  if (*sy) {
    const auto corpus = make_synthetic_corpus(sy_spec);
    auto out = open_output(sy_out);
    write_corpus(out, corpus);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ensloss::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ensloss::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ensloss::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
