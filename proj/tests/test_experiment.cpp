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

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "ensloss/errors.hpp"
#include "ensloss/experiment.hpp"
#include "ensloss/rng.hpp"
#include "ensloss/synthetic.hpp"

using namespace ensloss;

namespace {

Corpus tiny() { return read_corpus_file(std::filesystem::path(ENSLOSS_DATA_DIR) / "tiny_corpus.tsv"); }

Corpus small_synthetic() {
  SyntheticSpec spec;
  spec.documents = 200;
  spec.vocabulary = 80;
  spec.seed = 3;
  return make_synthetic_corpus(spec);
}

ExperimentPlan quick_plan() {
  ExperimentPlan plan;
  plan.noise_rates = {0.0, 0.3};
  plan.contenders = {"hinge", "ensemble"};
  plan.settings.train.epochs = 30;
  plan.master_seed = 11;
  return plan;
}

std::string tsv_of(const ResultsTable& t) {
  std::ostringstream out;
  write_results_tsv(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("one rate and one contender on the toy corpus") {
  ExperimentPlan plan;
  plan.noise_rates = {0.0};
  plan.contenders = {"ensemble"};
  plan.settings.min_doc_freq = 1;
  plan.test_fraction = 0.25;
  plan.settings.train.epochs = 20;
  const auto table = run_experiment(tiny(), plan);
  REQUIRE(table.cells.size() == 1);
  REQUIRE(table.cells[0].size() == 1);
  const double acc = table.cells[0][0].accuracy;
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(table.test_documents + table.train_documents == tiny().size());
  const auto tsv = tsv_of(table);
  CHECK(tsv.rfind("rate\tcontender\taccuracy\tseed\n0\tensemble\t", 0) == 0);
}

TEST_CASE("rerunning a plan gives byte-identical output") {
  const auto corpus = small_synthetic();
  const auto plan = quick_plan();
  const auto a = run_experiment(corpus, plan);
  const auto b = run_experiment(corpus, plan);
  CHECK(tsv_of(a) == tsv_of(b));
  std::ostringstream ta, tb;
  write_results_text(ta, a, find_published_reference("20news"));
  write_results_text(tb, b, find_published_reference("20news"));
  CHECK(ta.str() == tb.str());
  CHECK(ta.str().find("0.85") != std::string::npos);
  CHECK(a.cells.size() == 2);
  CHECK(a.cells[1].size() == 2);
}

TEST_CASE("each cell is reproducible from its recorded seeds") {
  const auto corpus = small_synthetic();
  const auto plan = quick_plan();
  const auto table = run_experiment(corpus, plan);
  const auto data = prepare(corpus, plan);
  for (std::size_t r = 0; r < plan.noise_rates.size(); ++r) {
    for (std::size_t c = 0; c < plan.contenders.size(); ++c) {
      const auto cell = run_cell(data, plan, r, c);
      CHECK(cell.accuracy == table.cells[r][c].accuracy);
      CHECK(cell.seed == table.cells[r][c].seed);
      CHECK(cell.seed == cell_seed(plan.master_seed, r, c));
    }
  }
  CHECK(table.split_seed == derive_seed(11, 0, 0));
  CHECK(table.noise_seeds[1] == derive_seed(11, 2, 0));
}

TEST_CASE("training never looks at the held-out split") {
  const auto corpus = small_synthetic();
  const auto plan = quick_plan();
  auto data = prepare(corpus, plan);
  const auto split_parts = split(corpus, plan.test_fraction, split_seed(plan.master_seed));
  CHECK(data.vocab == build_vocabulary(split_parts.train));
  CHECK(data.train == split_parts.train);

  const auto before = run_cell(data, plan, 1, 1);
  for (auto& x : data.test.features) {
    for (double& v : x.values) v = 1.0;
  }
  for (auto& y : data.test.labels) y = 1 - y;
  const auto after = run_cell(data, plan, 1, 1);
  CHECK(after.mixture == before.mixture);
  CHECK(after.final_residual == before.final_residual);
  CHECK(after.seed == before.seed);
}

TEST_CASE("a failing cell is named") {
  auto plan = quick_plan();
  plan.settings.train.lambda_init = std::vector<double>{0.5, 0.5, 0.5};
  try {
    run_experiment(small_synthetic(), plan);
    FAIL("expected failure");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("rate=0") != std::string::npos);
    CHECK(msg.find("contender=hinge") != std::string::npos);
  }
}

TEST_CASE("seed derivation is fixed") {
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(7, 1, 2) == mix64(mix64(mix64(7) ^ 1) ^ 2));
  CHECK(split_seed(7) != noise_seed(7, 0));
  CHECK(cell_seed(7, 0, 1) != cell_seed(7, 1, 0));
}

TEST_CASE("published references") {
  CHECK(published_references().size() == 4);
  const auto* trec = find_published_reference("trec");
  REQUIRE(trec);
  CHECK(trec->accuracy[2][3] == 0.93);
  CHECK(trec->accuracy[2][1] == 0.46);
  const auto* news = find_published_reference("20news");
  REQUIRE(news);
  CHECK(news->accuracy[0][3] == 0.85);
  CHECK(find_published_reference("none") == nullptr);
}

TEST_CASE("synthetic corpus generator") {
  SyntheticSpec spec;
  spec.documents = 101;
  spec.vocabulary = 50;
  spec.classes = 3;
  spec.seed = 4;
  const auto a = make_synthetic_corpus(spec);
  CHECK(a.size() == 101);
  CHECK(a.class_names == std::vector<std::string>{"c0", "c1", "c2"});
  CHECK(a == make_synthetic_corpus(spec));
  for (const auto& d : a.documents) {
    const auto n = tokenize(d.text).size();
    CHECK(n >= spec.min_length);
    CHECK(n <= spec.max_length);
  }
  spec.seed = 5;
  CHECK_FALSE(a == make_synthetic_corpus(spec));
}
