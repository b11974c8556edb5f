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

#ifndef GROUNDPROOF_TESTS_TEST_UTIL_H_
#define GROUNDPROOF_TESTS_TEST_UTIL_H_

#include <fstream>
#include <sstream>
#include <string>

#include "groundproof/corpus.h"

namespace gptest {

inline std::string Fixture(const std::string &name) {
  return std::string(GP_FIXTURE_DIR) + "/" + name;
}

inline std::string ReadAll(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const groundproof::Corpus &FixtureCorpus() {
  static const groundproof::Corpus corpus =
      groundproof::load_corpus(Fixture("corpus.json"));
  return corpus;
}

}  // namespace gptest

#endif  // GROUNDPROOF_TESTS_TEST_UTIL_H_
