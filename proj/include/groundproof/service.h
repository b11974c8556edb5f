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

#ifndef GROUNDPROOF_SERVICE_H_
#define GROUNDPROOF_SERVICE_H_

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "groundproof/corpus.h"
#include "groundproof/decoder.h"
#include "groundproof/harness.h"
#include "groundproof/lmbackend.h"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace groundproof {

inline constexpr const char *kSchemaVersion = "1.0";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  // /v1/prove answers 202 with a job token when decoding runs longer.
  double sync_timeout_seconds = 15.0;
  int max_k = 64;
  int default_page_size = 20;
  int max_page_size = 100;
  // Extra sampling rounds /v1/suggest may spend collecting k distinct steps.
  int distinct_rounds = 3;
  DecodeConfig decode;

  static ServiceConfig FromJson(const nlohmann::json &j);
  // GROUNDPROOF_BIND and GROUNDPROOF_PORT override the given values.
  static ServiceConfig FromEnvironment(ServiceConfig base);
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
  // Seconds, sent as Retry-After when set.
  std::optional<int> retry_after;
};

// JSON facade over the corpus and a language model. Handlers never mutate
// the corpus; the only state is the table of asynchronous prove jobs.
class Service {
 public:
  Service(const Corpus &corpus, std::shared_ptr<LanguageModel> lm, ServiceConfig config,
          const Retrievals *retrievals = nullptr);
  ~Service();

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  ServiceResponse health() const;
  ServiceResponse suggest(const std::string &body) const;
  ServiceResponse prove(const std::string &body);
  ServiceResponse job(const std::string &token);
  ServiceResponse theorem(const std::string &id) const;
  ServiceResponse search(const std::string &query, const std::string &page,
                         const std::string &page_size, const std::string &kind) const;

  // Installs every route on `server`.
  void install(httplib::Server &server);

  const ServiceConfig &config() const { return config_; }

 private:
  struct Job {
    std::shared_future<ServiceResponse> result;
  };

  ServiceResponse run_prove(const nlohmann::json &request) const;

  const Corpus &corpus_;
  std::shared_ptr<LanguageModel> lm_;
  ServiceConfig config_;
  const Retrievals *retrievals_;
  std::mutex jobs_mu_;
  std::map<std::string, Job> jobs_;
  std::atomic<uint64_t> next_job_{1};
};

// Blocks serving HTTP until the server is stopped.
bool serve(Service &service, const std::string &host, int port);

}  // namespace groundproof

#endif  // GROUNDPROOF_SERVICE_H_
