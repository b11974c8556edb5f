// Copyright 2026 The Groundproof Authors.
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

#include "groundproof/harness.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "groundproof/mock_model.h"
#include "test_util.h"

using namespace groundproof;

namespace {

std::shared_ptr<MockModel> HarnessMock() {
  return load_mock_script(gptest::Fixture("harness_mock.json"));
}

bool Near(double a, double b) { return std::abs(a - b) < 1e-12; }

ExperimentConfig NextStepConfig() {
  ExperimentConfig c;
  c.task = Task::kNextStep;
  c.decode.mode = DecodeMode::kGreedy;
  c.theorem_filter = std::vector<int>{5};
  return c;
}

std::shared_ptr<MockModel> StepMock() {
  return configure_mock({{"", {{"Wrong step.\n\n", 0.6},
                               {" By [[Definition:Even Integer]], $a = 2 k$.\n\n", 0.4}}}},
                        3);
}

}  // namespace

TEST_CASE("greedy fixture means") {
  const Corpus &c = gptest::FixtureCorpus();
  ExperimentConfig config = ExperimentConfig::Load(gptest::Fixture("experiment_greedy.json"));
  auto lm = HarnessMock();
  RunReport r = run_experiment(config, c, *lm);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.failures.empty());
  CHECK(Near(r.means.ref_p, 0.5));
  CHECK(Near(r.means.ref_r, 1.0 / 3.0));
  CHECK(Near(r.means.ref_f1, 7.0 / 18.0));
  CHECK(Near(r.means.halluc, 1.0 / 6.0));
  CHECK(r.entries[0].generated == "By [[Definition:Even Integer]], $n = 2 k$.\n\nSo $n^2$ is even.");
  CHECK(r.cost.calls == 3);
  CHECK(r.means_csv().starts_with("gleu,token_f1,kf1,ref_p,ref_r,ref_f1,halluc,n\n"));
  CHECK(r.to_json()["scored_theorems"] == 3);
}

TEST_CASE("stepwise++ recovers the covering proof of the fixture") {
  const Corpus &c = gptest::FixtureCorpus();
  ExperimentConfig config = ExperimentConfig::Load(gptest::Fixture("experiment_stepwisepp.json"));
  auto lm = HarnessMock();
  RunReport r = run_experiment(config, c, *lm);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].theorem_id == 4);
  CHECK(r.entries[0].metrics.ref_f1 == 1.0);
  CHECK(r.means.ref_f1 >= 7.0 / 18.0);
}

TEST_CASE("worker count does not change the report") {
  const Corpus &c = gptest::FixtureCorpus();
  ExperimentConfig config = ExperimentConfig::Load(gptest::Fixture("experiment_stepwisepp.json"));
  RunReport serial = run_experiment(config, c, *HarnessMock());
  config.workers = 3;
  RunReport parallel = run_experiment(config, c, *HarnessMock());
  nlohmann::json a = serial.to_json(), b = parallel.to_json();
  a["config"].erase("workers");
  b["config"].erase("workers");
  CHECK(a.dump() == b.dump());
  CHECK(serial.entries_csv() == parallel.entries_csv());
}

TEST_CASE("compatibility matrix") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.task = Task::kNextStep;
  CHECK_THROWS_AS(c.validate(), HarnessError);
  c.decode.mode = DecodeMode::kStepwise;
  CHECK_THROWS_AS(c.validate(), HarnessError);
  c.decode.mode = DecodeMode::kGreedy;
  CHECK_NOTHROW(c.validate());
  c.task = Task::kFullProof;
  c.decode.mode = DecodeMode::kStepwisePP;
  c.setting = KnowledgeSetting::kNone;
  CHECK_THROWS_AS(c.validate(), HarnessError);
  c.decode.mode = DecodeMode::kRerank;
  CHECK_NOTHROW(c.validate());
  c.setting = KnowledgeSetting::kRetrieved;
  CHECK_THROWS_AS(c.validate(), HarnessError);
  c.retrievals_path = "r.json";
  CHECK_NOTHROW(c.validate());
  ExperimentConfig back = ExperimentConfig::FromJson(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"task", "lemma"}}), HarnessError);
}

TEST_CASE("retrieval files are cleaned with warnings") {
  const Corpus &c = gptest::FixtureCorpus();
  RetrievalFile f = load_retrievals(gptest::Fixture("retrievals.json"), &c);
  CHECK(f.retrievals.at(1).size() == 20);
  CHECK(f.retrievals.at(4) ==
        std::vector<std::string>{"Definition:Even Integer", "Definition:Integer",
                                 "Axiom:Distributive Law", "Definition:Odd Integer",
                                 "Definition:Prime Number", "Definition:Square"});
  auto mentions = [&](const std::string &needle) {
    int n = 0;
    for (const std::string &w : f.warnings) n += w.find(needle) != std::string::npos;
    return n;
  };
  CHECK(mentions("999") >= 1);
  CHECK(f.warnings.size() >= 4);
  nlohmann::json long_list = nlohmann::json::object();
  for (int i = 0; i < 25; ++i) long_list["4"].push_back("Definition:T" + std::to_string(i));
  CHECK(parse_retrievals(long_list).retrievals.at(4).size() == 20);
  CHECK_THROWS_AS(parse_retrievals(nlohmann::json::array()), HarnessError);
  CHECK_THROWS_AS(parse_retrievals({{"x", {"a"}}}), HarnessError);
  CHECK_THROWS_AS(parse_retrievals({{"4", "a"}}), HarnessError);
  CHECK_THROWS_AS(load_retrievals("/nonexistent.json"), HarnessError);
}

TEST_CASE("knowledge titles per setting") {
  const Corpus &c = gptest::FixtureCorpus();
  CHECK(knowledge_titles(KnowledgeSetting::kNone, 4, c, nullptr).empty());
  CHECK(knowledge_titles(KnowledgeSetting::kProvided, 6, c, nullptr) ==
        std::vector<std::string>{"Definition:Integer", "Definition:Even Integer"});
  Retrievals r{{6, {"Definition:Integer"}}};
  CHECK(knowledge_titles(KnowledgeSetting::kRetrieved, 6, c, &r).size() == 1);
  CHECK_THROWS_AS(knowledge_titles(KnowledgeSetting::kRetrieved, 5, c, &r), HarnessError);
}

TEST_CASE("theorem selection follows the split and filter") {
  const Corpus &c = gptest::FixtureCorpus();
  ExperimentConfig config;
  CHECK(select_theorems(config, c) == std::vector<int>{4, 5, 6});
  config.theorem_filter = std::vector<int>{6, 4};
  CHECK(select_theorems(config, c) == std::vector<int>{4, 6});
  config.split = Split::kValid;
  config.theorem_filter.reset();
  CHECK(select_theorems(config, c) == std::vector<int>{8});
}

TEST_CASE("next-step suggestions are scored and the best kept") {
  const Corpus &c = gptest::FixtureCorpus();
  auto lm = StepMock();
  RunReport r = run_next_step(NextStepConfig(), c, *lm);
  const Example &gold = *c.find_example(5);
  REQUIRE(r.entries.size() == gold.proof.steps.size());
  for (size_t t = 0; t < r.entries.size(); ++t) {
    const TheoremEntry &e = r.entries[t];
    CHECK(e.step_index == static_cast<int>(t));
    REQUIRE(e.suggestions.size() == 10);
    std::vector<MetricReport> reports;
    for (const auto &s : e.suggestions) reports.push_back(s.metrics);
    CHECK(e.selected == static_cast<int>(best_of_k(reports)));
    CHECK(e.metrics.selection_sum() == reports[static_cast<size_t>(e.selected)].selection_sum());
  }
  bool drew_gold = false;
  for (const auto &s : r.entries[0].suggestions) drew_gold |= s.text == gold.proof.steps[0].raw;
  if (drew_gold) CHECK(r.entries[0].metrics.gleu == 1.0);
  ExperimentConfig capped = NextStepConfig();
  capped.max_steps_per_proof = 1;
  CHECK(run_next_step(capped, c, *lm).entries.size() == 1);
  CHECK_THROWS_AS(run_full_proof(NextStepConfig(), c, *lm), HarnessError);
}

TEST_CASE("suggestions cut at the proof end and dedupe on request") {
  Reference thm;
  thm.title = "T";
  auto lm = configure_mock({{"", {{" A.\n\n", 0.5}, {" B. </proof> junk", 0.3}, {" \n\n", 0.2}}}},
                           1);
  SuggestOptions o;
  o.k = 30;
  o.temperature = 1.0;
  auto raw = suggest_next_steps(thm, {}, {}, o, *lm);
  CHECK(raw.size() < 30);
  for (const Suggestion &s : raw) {
    CHECK((s.text == "A." || s.text == "B."));
    CHECK(s.terminated == (s.text == "B."));
  }
  o.k = 2;
  o.distinct_rounds = 3;
  auto distinct = suggest_next_steps(thm, {}, {}, o, *lm);
  REQUIRE(distinct.size() == 2);
  CHECK(distinct[0].text != distinct[1].text);
}

TEST_CASE("coverage is restricted to the given titles") {
  Reference thm;
  thm.title = "T";
  auto lm = configure_mock({{"", {{" [[Definition:A]] and [[Definition:B]].\n\n", 1.0}}}}, 1);
  SuggestOptions o;
  auto s = suggest_next_steps(thm, {"Definition:A"}, {}, o, *lm);
  REQUIRE(s.size() == 1);
  CHECK(s[0].covered_titles == std::set<std::string>{"Definition:A"});
  s = suggest_next_steps(thm, {}, {}, o, *lm);
  CHECK(s[0].covered_titles.size() == 2);
}

TEST_CASE("failures are recorded per theorem and abort past half") {
  const Corpus &c = gptest::FixtureCorpus();
  ExperimentConfig config;
  config.decode.mode = DecodeMode::kGreedy;
  auto only_t5 = configure_mock(
      {{"Then $a b$ is even. </content> </theorem> <ref> Definition:Even Integer </ref> <proof>",
        {{" ok. </proof>", 1.0}}}},
      0);
  CHECK_THROWS_AS(run_full_proof(config, c, *only_t5), HarnessError);
  config.theorem_filter = std::vector<int>{4, 5};
  RunReport r = run_full_proof(config, c, *only_t5);
  CHECK(r.entries.size() == 1);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].theorem_id == 4);
  CHECK(r.to_json()["failures"].size() == 1);
}

TEST_CASE("predictions are scored against gold proofs") {
  const Corpus &c = gptest::FixtureCorpus();
  std::string path = std::string(GP_TMP_DIR) + "/predictions.jsonl";
  {
    std::ofstream out(path);
    out << nlohmann::json{{"theorem_id", 5}, {"proof", c.find_example(5)->proof.text()}}.dump()
        << "\n"
        << nlohmann::json{{"theorem_id", 2}, {"proof", "x"}}.dump() << "\n";
  }
  RunReport r = score_predictions(load_predictions(path), c);
  std::remove(path.c_str());
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].metrics.gleu == 1.0);
  CHECK(r.failures.size() == 1);
}

TEST_CASE("correlation matrix") {
  auto run = [](double gleu, double halluc) {
    RunReport r;
    r.means.gleu = gleu;
    r.means.halluc = halluc;
    return r;
  };
  auto agg = [](double correct) {
    AggregateReport a;
    a.overall_correct_mean = correct;
    return a;
  };
  CorrelationMatrix m = correlate({{"a", run(0.1, 0.3)}, {"b", run(0.2, 0.2)}, {"c", run(0.4, 0.1)},
                                   {"orphan", run(0.9, 0.9)}},
                                  {{"a", agg(1)}, {"b", agg(2)}, {"c", agg(3)}});
  CHECK(m.labels == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.automatic.back() == "neg_halluc");
  REQUIRE(m.human.front() == "overall_correct");
  CHECK(m.cells[0][0].has_value());
  CHECK(*m.cells[6][0] == doctest::Approx(1.0));
  CHECK_FALSE(m.cells[1][0].has_value());
  CHECK(m.to_json()["matrix"][1]["r"]["overall_correct"] == "undefined");
  CHECK(m.to_csv().find("undefined") != std::string::npos);
  CorrelationMatrix single = correlate({{"a", run(0.1, 0.3)}}, {{"a", agg(1)}});
  CHECK_FALSE(single.cells[0][0].has_value());
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
