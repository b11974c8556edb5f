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

#include "groundproof/decoder.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "groundproof/mock_model.h"

using namespace groundproof;

namespace {

Candidate WithCoverage(int covered, double logprob, int id) {
  std::vector<std::string> steps = {"s" + std::to_string(id)};
  for (int i = 0; i < covered; ++i) steps.push_back("[[Definition:C" + std::to_string(i) + "]]");
  return Candidate::Make(steps, logprob, false);
}

std::set<std::string> Constraints(int n) {
  std::set<std::string> out;
  for (int i = 0; i < n; ++i) out.insert("Definition:C" + std::to_string(i));
  return out;
}

struct Fixture {
  Reference theorem;
  DecodeTask task;
  std::shared_ptr<MockModel> lm;

  Fixture() {
    theorem.id = 1;
    theorem.kind = ReferenceKind::kTheorem;
    theorem.title = "T";
    theorem.content = {"x holds."};
    task.theorem = &theorem;
    task.ref_titles = {"Definition:A"};
    lm = configure_mock({{"<proof>",
                          {{" Obvious. </proof>", 0.6},
                           {" By [[Definition:A]], x.\n\n", 0.4, true}}},
                         {"x.\n\n", {{"So done. </proof>", 1.0}}}},
                        3);
  }
};

}  // namespace

TEST_CASE("value function normalization example") {
  std::vector<Candidate> cs = {WithCoverage(2, -1, 0), WithCoverage(1, -2, 1),
                               WithCoverage(0, -4, 2)};
  auto scores = score_candidates(cs, Constraints(2), 0.5);
  CHECK(std::abs(scores[0] - 0.375) < 1e-12);
  CHECK(std::abs(scores[1] - 0.0) < 1e-12);
  CHECK(std::abs(scores[2] + 0.5) < 1e-12);
  CHECK(rank_candidates(cs, scores) == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("zero coverage and zero logprob do not divide by zero") {
  std::vector<Candidate> cs = {WithCoverage(0, 0.0, 0), WithCoverage(0, 0.0, 1)};
  auto scores = score_candidates(cs, {}, 0.5);
  CHECK(scores[0] == 0.0);
  CHECK(scores[1] == 0.0);
  CHECK(rank_candidates(cs, scores) == std::vector<size_t>{0, 1});
}

TEST_CASE("alpha extremes order by one component") {
  std::mt19937_64 rng(1234);
  for (int iter = 0; iter < 1000; ++iter) {
    int n = 2 + static_cast<int>(rng() % 8);
    int m = 1 + static_cast<int>(rng() % 5);
    std::vector<Candidate> cs;
    for (int i = 0; i < n; ++i) {
      double lp = -static_cast<double>(rng() % 2000) / 97.0;
      cs.push_back(WithCoverage(static_cast<int>(rng() % (m + 1)), lp, i));
    }
    auto set = Constraints(m);
    auto by_lp = score_candidates(cs, set, 0.0);
    auto by_cov = score_candidates(cs, set, 1.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        CHECK((by_lp[a] < by_lp[b]) == (cs[a].cum_logprob < cs[b].cum_logprob));
        int ca = v_constraint(cs[a], set), cb = v_constraint(cs[b], set);
        CHECK((by_cov[a] < by_cov[b]) == (ca < cb));
      }
    }
  }
}

TEST_CASE("config defaults, quotas and json") {
  DecodeConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.cluster_quotas() == std::vector<int>{3, 3, 3});
  CHECK(c.modal_temperature() == 0.3);
  c.beam_size = 10;
  CHECK(c.cluster_quotas() == std::vector<int>{3, 3, 4});
  DecodeConfig back = DecodeConfig::FromJson(c.to_json());
  CHECK(back.to_json() == c.to_json());
  DecodeConfig partial = DecodeConfig::FromJson({{"mode", "greedy"},
                                                 {"temperature_schedule", {{2, 0.1}, {1, 0.9}}}});
  CHECK(partial.mode == DecodeMode::kGreedy);
  CHECK(partial.expansions == 3);
  CHECK_THROWS_AS(DecodeConfig::FromJson({{"N", 4}}), std::invalid_argument);
  CHECK_THROWS_AS(DecodeConfig::FromJson({{"mode", "beam"}}), std::invalid_argument);
  CHECK_THROWS_AS(DecodeConfig::FromJson({{"final_alpha", 1.5}}), std::invalid_argument);
  CHECK(ParseDecodeMode("stepwise++") == DecodeMode::kStepwisePP);
}

TEST_CASE("greedy takes the likeliest proof in one pass") {
  Fixture f;
  auto r = decode_greedy(f.task, *f.lm, DecodeConfig{});
  CHECK(r.proof.steps == std::vector<std::string>{"Obvious."});
  CHECK(r.trace.iterations.size() == 1);
  CHECK(r.trace.expansions == 1);
  CHECK(std::abs(r.proof.cum_logprob - std::log(0.6)) < 1e-12);
}

TEST_CASE("rerank draws n full proofs and prefers coverage") {
  Fixture f;
  DecodeConfig c;
  c.rerank_n = 10;
  c.rerank_temperature = 1.0;
  auto r = decode_rerank(f.task, *f.lm, c);
  CHECK(r.trace.expansions == 10);
  CHECK(r.trace.iterations.at(0).expanded_prefixes == 1);
  bool covering_drawn = false;
  for (const auto &t : r.trace.iterations[0].candidates) covering_drawn |= t.coverage == 1;
  if (covering_drawn) CHECK(r.proof.covered_titles.contains("Definition:A"));
}

TEST_CASE("stepwise++ finds the covering proof") {
  Fixture f;
  DecodeConfig c;
  auto r = decode_stepwisepp(f.task, *f.lm, c);
  CHECK(r.proof.steps ==
        std::vector<std::string>{"By [[Definition:A]], x.", "So done."});
  CHECK(r.proof.terminated);
  CHECK(std::abs(r.proof.cum_logprob - std::log(0.4)) < 1e-12);
  REQUIRE(r.trace.iterations.size() == 2);
  CHECK(r.trace.iterations[0].expansions == 10);
  CHECK(r.trace.iterations[0].candidates.size() == 2);
  CHECK(r.trace.iterations[1].expanded_prefixes == 1);
  CHECK(r.trace.iterations[1].expansions == 10);
  for (const auto &it : r.trace.iterations) {
    CHECK(it.expansions <= c.expansions * c.beam_size);
    for (const auto &cand : it.candidates) CHECK(cand.scores.size() == 3);
  }
  CHECK(r.trace.fewer_than_k_terminated);
  CHECK(r.trace.to_json()["iterations"].size() == 2);
}

TEST_CASE("pure likelihood stepwise matches greedy here") {
  Fixture f;
  auto r = decode_stepwise(f.task, *f.lm, DecodeConfig{}, 0.0);
  CHECK(r.proof.steps == std::vector<std::string>{"Obvious."});
  CHECK(r.trace.mode == DecodeMode::kStepwise);
  CHECK_THROWS_AS(decode_stepwise(f.task, *f.lm, DecodeConfig{}, 2.0), std::invalid_argument);
}

TEST_CASE("parallel expansion gives the same search") {
  Fixture f;
  DecodeConfig c;
  auto serial = decode_stepwisepp(f.task, *f.lm, c);
  c.parallel = true;
  auto parallel = decode_stepwisepp(f.task, *f.lm, c);
  CHECK(serial.trace.to_json() == parallel.trace.to_json());
}

TEST_CASE("step cap forces termination") {
  Reference thm;
  thm.title = "Loop";
  DecodeTask task{&thm, {}};
  auto lm = configure_mock({{"", {{"again.\n\n", 1.0}}}}, 0);
  DecodeConfig c;
  c.max_steps = 3;
  auto r = decode_stepwisepp(task, *lm, c);
  CHECK(r.proof.forced);
  CHECK(r.trace.forced);
  CHECK(r.proof.steps.size() == 3);
}

TEST_CASE("backend failures surface as decode errors with a trace") {
  Reference thm;
  thm.title = "Nothing";
  DecodeTask task{&thm, {}};
  auto lm = configure_mock({{"unrelated", {{"x", 1.0}}}}, 0);
  try {
    decode_stepwisepp(task, *lm, DecodeConfig{});
    FAIL("expected DecodeError");
  } catch (const DecodeError &e) {
    CHECK_FALSE(e.retryable());
    CHECK(e.trace().iterations.empty());
  }
  auto empty = configure_mock({{"", {{"   </proof>", 1.0}}}}, 0);
  DecodeConfig c;
  c.rerank_temperature = 1.0;
  CHECK_THROWS_AS(decode_rerank(task, *empty, c), DecodeError);
  CHECK(decode_greedy(task, *empty, c).trace.degenerate);
}
