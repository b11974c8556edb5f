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

#include "groundproof/mock_model.h"

#include <cmath>
#include <map>

#include "doctest.h"
#include "test_util.h"

using namespace groundproof;

namespace {

std::shared_ptr<MockModel> ThreeWay(uint64_t seed) {
  return configure_mock({{"Q:", {{" a", 0.5}, {" b", 0.3}, {" c", 0.2}}}}, seed);
}

}  // namespace

TEST_CASE("sampled frequencies follow the weights") {
  auto lm = ThreeWay(11);
  SampleRequest r;
  r.prompt = "Q:";
  r.temperature = 1.0;
  r.n = 10000;
  std::map<std::string, int> counts;
  for (const SampleResult &s : lm->sample(r)) ++counts[s.text];
  CHECK(std::abs(counts[" a"] / 10000.0 - 0.5) < 0.03);
  CHECK(std::abs(counts[" b"] / 10000.0 - 0.3) < 0.03);
  CHECK(std::abs(counts[" c"] / 10000.0 - 0.2) < 0.03);
}

TEST_CASE("logprob is the scripted probability regardless of temperature") {
  auto lm = ThreeWay(3);
  SampleRequest r;
  r.prompt = "Q:";
  r.temperature = 0.3;
  r.n = 50;
  for (const SampleResult &s : lm->sample(r)) {
    CHECK(s.logprob == doctest::Approx(std::log(lm->probability("Q:", s.text))));
    CHECK(s.token_count == 1);
  }
  CHECK(lm->probability("nothing", " a") == 0.0);
}

TEST_CASE("zero temperature takes the argmax and breaks ties by text") {
  auto lm = configure_mock({{"", {{"zeta", 1.0}, {"alpha", 1.0}, {"mid", 0.5}}}}, 1);
  SampleRequest r;
  r.prompt = "anything";
  r.n = 4;
  for (const SampleResult &s : lm->sample(r)) CHECK(s.text == "alpha");
}

TEST_CASE("low temperature sharpens without underflow") {
  auto lm = ThreeWay(5);
  SampleRequest r;
  r.prompt = "Q:";
  r.temperature = 0.001;
  r.n = 200;
  for (const SampleResult &s : lm->sample(r)) CHECK(s.text == " a");
}

TEST_CASE("draws are keyed by stream, not call order") {
  auto lm = ThreeWay(9);
  SampleRequest r;
  r.prompt = "Q:";
  r.temperature = 1.0;
  r.n = 20;
  r.stream = {2, 1, 0};
  auto first = lm->sample(r);
  auto second = lm->sample(r);
  for (size_t i = 0; i < first.size(); ++i) CHECK(first[i].text == second[i].text);
  // Sample i of a batch equals a single draw at offset i.
  SampleRequest one = r;
  one.n = 1;
  one.stream.sample = 7;
  CHECK(lm->sample(one)[0].text == first[7].text);
  // Another seed gives another sequence.
  auto other = ThreeWay(10)->sample(r);
  int same = 0;
  for (size_t i = 0; i < first.size(); ++i) same += first[i].text == other[i].text;
  CHECK(same < 20);
}

TEST_CASE("continuations chain through longer suffixes") {
  auto lm = configure_mock({{"P:", {{" s1.\n\n", 1.0, true}}},
                            {"P: s1.\n\n", {{"s2.\n\n", 0.5, true}, {"end </proof>", 0.5}}},
                            {"s2.\n\n", {{"done </proof>", 1.0}}}},
                           2);
  SampleRequest r;
  r.prompt = "P:";
  r.temperature = 1.0;
  r.n = 40;
  r.max_tokens = 100;
  for (const SampleResult &s : lm->sample(r)) {
    bool ok = s.text == " s1.\n\ns2.\n\ndone </proof>" || s.text == " s1.\n\nend </proof>";
    CHECK(ok);
    CHECK(s.logprob == doctest::Approx(std::log(0.5)));
    CHECK(s.truncated_by == SampleResult::Finish::kEnd);
  }
}

TEST_CASE("stop sequences and token limits cut the chain") {
  auto lm = configure_mock({{"P:", {{" s1.\n\n", 1.0, true}}},
                            {"s1.\n\n", {{"s2 a b c.\n\n", 1.0, true}}}},
                           2);
  SampleRequest r;
  r.prompt = "P:";
  r.stop_sequences = {"\n\n"};
  auto s = lm->sample(r)[0];
  CHECK(s.text == " s1.");
  CHECK(s.truncated_by == SampleResult::Finish::kStop);
  r.stop_sequences.clear();
  r.max_tokens = 3;
  s = lm->sample(r)[0];
  CHECK(s.text == " s1.\n\ns2 a ");
  CHECK(s.token_count == 3);
  CHECK(s.truncated_by == SampleResult::Finish::kMaxTokens);
  CHECK(s.logprob == 0.0);
}

TEST_CASE("unscripted prompts are terminal errors") {
  auto lm = ThreeWay(1);
  SampleRequest r;
  r.prompt = "nope";
  CHECK_THROWS_AS(lm->sample(r), TerminalError);
}

TEST_CASE("script errors") {
  CHECK_THROWS_AS(configure_mock({{"a", {}}}, 0), ScriptError);
  CHECK_THROWS_AS(configure_mock({{"a", {{"x", 0.0}}}}, 0), ScriptError);
  CHECK_THROWS_AS(configure_mock({{"a", {{"x", 1.0}}}, {"a", {{"y", 1.0}}}}, 0), ScriptError);
  CHECK_THROWS_AS(mock_from_json(nlohmann::json::array()), ScriptError);
  CHECK_THROWS_AS(mock_from_json(nlohmann::json::parse(R"({"rules": [{"suffix": "a"}]})")),
                  ScriptError);
  CHECK_THROWS_AS(load_mock_script("/nonexistent/script.json"), ScriptError);
}

TEST_CASE("script files load with a seed override") {
  auto lm = load_mock_script(gptest::Fixture("harness_mock.json"));
  CHECK(lm->seed() == 1);
  CHECK(lm->rules().size() >= 4);
  CHECK(load_mock_script(gptest::Fixture("harness_mock.json"), 7)->seed() == 7);
  CHECK(lm->rules()[0].continuations[0].continues);
}
