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

#include "groundproof/service.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>

#include "httplib.h"

namespace groundproof {

using json = nlohmann::json;

namespace {

// A request that violates the API contract; answered with 422.
class InvalidRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ServiceResponse Error(int status, const std::string &code, const std::string &message,
                      bool retryable = false) {
  ServiceResponse r;
  r.status = status;
  r.body = {{"schema_version", kSchemaVersion},
            {"error", {{"code", code}, {"message", message}, {"retryable", retryable}}}};
  if (retryable) r.retry_after = 1;
  return r;
}

ServiceResponse Ok(json body, int status = 200) {
  body["schema_version"] = kSchemaVersion;
  ServiceResponse r;
  r.status = status;
  r.body = std::move(body);
  return r;
}

json ParseBody(const std::string &body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error &e) {
    throw InvalidRequest(std::string("body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidRequest("body must be a JSON object");
  return j;
}

std::string ToLower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<long> ParseLong(const std::string &s) {
  if (s.empty()) return std::nullopt;
  char *end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (*end != '\0') return std::nullopt;
  return v;
}

// The theorem a request is about: a corpus page or an inline one.
struct ResolvedTheorem {
  const Reference *page = nullptr;
  Reference inline_page;
  const Example *gold = nullptr;

  const Reference &ref() const { return page ? *page : inline_page; }
};

ResolvedTheorem ResolveTheorem(const json &req, const Corpus &corpus) {
  bool has_id = req.contains("theorem_id") && !req["theorem_id"].is_null();
  bool has_inline = req.contains("theorem") && !req["theorem"].is_null();
  if (has_id == has_inline) {
    throw InvalidRequest("exactly one of theorem_id and theorem is required");
  }
  ResolvedTheorem out;
  if (has_id) {
    if (!req["theorem_id"].is_number_integer()) {
      throw InvalidRequest("theorem_id must be an integer");
    }
    int id = req["theorem_id"].get<int>();
    out.page = corpus.find_by_id(id);
    if (!out.page) throw NotFound("unknown theorem_id " + std::to_string(id));
    if (out.page->kind != ReferenceKind::kTheorem) {
      throw InvalidRequest("page " + std::to_string(id) + " is not a theorem");
    }
    out.gold = corpus.find_example(id);
    return out;
  }
  const json &t = req["theorem"];
  if (!t.is_object() || !t.contains("title") || !t["title"].is_string()) {
    throw InvalidRequest("inline theorem needs a string title");
  }
  out.inline_page.kind = ReferenceKind::kTheorem;
  out.inline_page.title = t["title"].get<std::string>();
  if (t.contains("content")) {
    if (t["content"].is_string()) {
      out.inline_page.content = {t["content"].get<std::string>()};
    } else if (t["content"].is_array()) {
      for (const json &line : t["content"]) {
        if (!line.is_string()) throw InvalidRequest("theorem content lines must be strings");
        out.inline_page.content.push_back(line.get<std::string>());
      }
    } else {
      throw InvalidRequest("theorem content must be a string or a list of lines");
    }
  }
  return out;
}

// Constraint titles from an explicit list or from a knowledge setting.
std::vector<std::string> ResolveTitles(const json &req, const ResolvedTheorem &theorem,
                                       const Retrievals *retrievals,
                                       KnowledgeSetting &setting_out) {
  if (req.contains("constraint_titles") && !req["constraint_titles"].is_null()) {
    if (!req["constraint_titles"].is_array()) {
      throw InvalidRequest("constraint_titles must be a list");
    }
    std::vector<std::string> titles;
    for (const json &t : req["constraint_titles"]) {
      if (!t.is_string()) throw InvalidRequest("constraint titles must be strings");
      std::string title = normalize_title(t.get<std::string>());
      if (std::find(titles.begin(), titles.end(), title) == titles.end()) {
        titles.push_back(std::move(title));
      }
    }
    setting_out = KnowledgeSetting::kProvided;
    return titles;
  }
  std::string name = req.value("setting", std::string("none"));
  auto setting = ParseKnowledgeSetting(name);
  if (!setting) throw InvalidRequest("unknown setting '" + name + "'");
  setting_out = *setting;
  switch (*setting) {
    case KnowledgeSetting::kNone:
      return {};
    case KnowledgeSetting::kProvided:
      if (!theorem.gold) {
        throw InvalidRequest("setting 'provided' needs a theorem with a gold proof");
      }
      return theorem.gold->proof.ref_titles;
    case KnowledgeSetting::kRetrieved: {
      if (!theorem.page) throw InvalidRequest("setting 'retrieved' needs a theorem_id");
      if (!retrievals) throw InvalidRequest("no retrievals are loaded");
      auto it = retrievals->find(theorem.page->id);
      if (it == retrievals->end()) {
        throw InvalidRequest("no retrievals for theorem " + std::to_string(theorem.page->id));
      }
      return it->second;
    }
  }
  return {};
}

json CandidateJson(const Candidate &c, const std::string &sep) {
  return {{"steps", c.steps},
          {"text", c.text(sep)},
          {"cum_logprob", c.cum_logprob},
          {"terminated", c.terminated},
          {"forced", c.forced},
          {"covered_titles", c.covered_titles}};
}

json ReferenceJson(const Reference &r, const Corpus &corpus) {
  json j = {{"id", r.id},
            {"kind", ReferenceKindName(r.kind)},
            {"title", r.title},
            {"content", r.content}};
  auto split = corpus.split_of(r.id);
  j["split"] = split ? json(SplitName(*split)) : json(nullptr);
  if (const Example *ex = corpus.find_example(r.id)) {
    json steps = json::array();
    for (const ProofStep &s : ex->proof.steps) steps.push_back(s.raw);
    j["proof"] = {{"steps", steps}, {"ref_titles", ex->proof.ref_titles}};
  } else {
    j["proof"] = nullptr;
  }
  return j;
}

}  // namespace

ServiceConfig ServiceConfig::FromJson(const json &j) {
  ServiceConfig c;
  if (!j.is_object()) throw std::invalid_argument("service config must be an object");
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.sync_timeout_seconds = j.value("sync_timeout_seconds", c.sync_timeout_seconds);
  c.max_k = j.value("max_k", c.max_k);
  c.default_page_size = j.value("default_page_size", c.default_page_size);
  c.max_page_size = j.value("max_page_size", c.max_page_size);
  c.distinct_rounds = j.value("distinct_rounds", c.distinct_rounds);
  if (j.contains("decode")) c.decode = DecodeConfig::FromJson(j["decode"]);
  return c;
}

ServiceConfig ServiceConfig::FromEnvironment(ServiceConfig base) {
  if (const char *v = std::getenv("GROUNDPROOF_BIND")) base.host = v;
  if (const char *v = std::getenv("GROUNDPROOF_PORT")) base.port = std::atoi(v);
  return base;
}

Service::Service(const Corpus &corpus, std::shared_ptr<LanguageModel> lm,
                 ServiceConfig config, const Retrievals *retrievals)
    : corpus_(corpus), lm_(std::move(lm)), config_(std::move(config)),
      retrievals_(retrievals) {}

Service::~Service() {
  std::lock_guard<std::mutex> lock(jobs_mu_);
  for (auto &[token, job] : jobs_) job.result.wait();
}

ServiceResponse Service::health() const {
  return Ok({{"status", "ok"},
             {"references", corpus_.references().size()},
             {"examples", corpus_.examples().size()}});
}

ServiceResponse Service::suggest(const std::string &body) const {
  try {
    json req = ParseBody(body);
    ResolvedTheorem theorem = ResolveTheorem(req, corpus_);
    KnowledgeSetting setting = KnowledgeSetting::kNone;
    std::vector<std::string> titles =
        ResolveTitles(req, theorem, retrievals_, setting);

    std::vector<std::string> history;
    if (req.contains("proof_so_far") && !req["proof_so_far"].is_null()) {
      if (!req["proof_so_far"].is_array()) throw InvalidRequest("proof_so_far must be a list");
      for (const json &s : req["proof_so_far"]) {
        if (!s.is_string()) throw InvalidRequest("proof_so_far entries must be strings");
        history.push_back(s.get<std::string>());
      }
    }
    json k = req.value("k", json(1));
    if (!k.is_number_integer() || k.get<long>() < 1) {
      throw InvalidRequest("k must be an integer of at least 1");
    }
    if (k.get<long>() > config_.max_k) {
      throw InvalidRequest("k must not exceed " + std::to_string(config_.max_k));
    }
    json temperature = req.value("temperature", json(0.6));
    if (!temperature.is_number() || temperature.get<double>() < 0.0) {
      throw InvalidRequest("temperature must be a non-negative number");
    }
    uint64_t seed = 0;
    if (req.contains("seed") && !req["seed"].is_null()) {
      if (!req["seed"].is_number_unsigned()) {
        throw InvalidRequest("seed must be a non-negative integer");
      }
      seed = req["seed"].get<uint64_t>();
    }

    SuggestOptions options;
    options.k = k.get<int>();
    options.temperature = temperature.get<double>();
    options.budgets = config_.decode.budgets;
    options.step_separator = config_.decode.step_separator;
    options.stream = {static_cast<uint64_t>(history.size()), seed, 0};
    options.distinct_rounds = config_.distinct_rounds;

    std::vector<Suggestion> suggestions =
        suggest_next_steps(theorem.ref(), titles, history, options, *lm_);
    json list = json::array();
    uint64_t tokens = 0;
    for (const Suggestion &s : suggestions) {
      tokens += static_cast<uint64_t>(s.token_count);
      list.push_back({{"text", s.text},
                      {"logprob", s.logprob},
                      {"covered_titles", s.covered_titles},
                      {"terminated", s.terminated}});
    }
    json out = {{"suggestions", list},
                {"constraint_titles", titles},
                {"setting", KnowledgeSettingName(setting)},
                {"cost", {{"generated_tokens", tokens}}}};
    if (theorem.page) out["theorem_id"] = theorem.page->id;
    return Ok(std::move(out));
  } catch (const NotFound &e) {
    return Error(404, "not_found", e.what());
  } catch (const InvalidRequest &e) {
    return Error(422, "invalid_request", e.what());
  } catch (const PromptError &e) {
    return Error(422, "prompt_too_long", e.what());
  } catch (const BackendError &e) {
    return Error(502, "backend_error", e.what(), e.retryable());
  }
}

ServiceResponse Service::run_prove(const json &req) const {
  try {
    ResolvedTheorem theorem = ResolveTheorem(req, corpus_);
    KnowledgeSetting setting = KnowledgeSetting::kNone;
    std::vector<std::string> titles =
        ResolveTitles(req, theorem, retrievals_, setting);
    DecodeConfig config = config_.decode;
    if (req.contains("decode") && !req["decode"].is_null()) {
      if (!req["decode"].is_object()) throw InvalidRequest("decode must be an object");
      json merged = config.to_json();
      merged.merge_patch(req["decode"]);
      try {
        config = DecodeConfig::FromJson(merged);
        config.validate();
      } catch (const std::exception &e) {
        throw InvalidRequest(std::string("decode: ") + e.what());
      }
    }
    if ((config.mode == DecodeMode::kStepwise || config.mode == DecodeMode::kStepwisePP) &&
        setting != KnowledgeSetting::kProvided) {
      throw InvalidRequest(std::string("decode mode '") + DecodeModeName(config.mode) +
                           "' requires provided references");
    }
    config.parallel = false;

    DecodeTask task{&theorem.ref(), titles};
    DecodeResult result = decode(task, *lm_, config);
    json out = {{"proof", CandidateJson(result.proof, config.step_separator)},
                {"constraint_titles", titles},
                {"setting", KnowledgeSettingName(setting)},
                {"mode", DecodeModeName(config.mode)},
                {"trace", result.trace.summary()}};
    if (theorem.page) out["theorem_id"] = theorem.page->id;
    if (theorem.gold) {
      out["metrics"] = score_proof(result.proof.text(config.step_separator),
                                   theorem.gold->proof, corpus_)
                           .to_json();
    } else {
      out["metrics"] = nullptr;
    }
    return Ok(std::move(out));
  } catch (const NotFound &e) {
    return Error(404, "not_found", e.what());
  } catch (const InvalidRequest &e) {
    return Error(422, "invalid_request", e.what());
  } catch (const PromptError &e) {
    return Error(422, "prompt_too_long", e.what());
  } catch (const DecodeError &e) {
    return Error(502, "decode_failed", e.what(), e.retryable());
  } catch (const BackendError &e) {
    return Error(502, "backend_error", e.what(), e.retryable());
  }
}

ServiceResponse Service::prove(const std::string &body) {
  json req;
  try {
    req = ParseBody(body);
  } catch (const InvalidRequest &e) {
    return Error(422, "invalid_request", e.what());
  }
  std::shared_future<ServiceResponse> result =
      std::async(std::launch::async, [this, req] { return run_prove(req); }).share();
  auto wait = std::chrono::duration<double>(config_.sync_timeout_seconds);
  if (result.wait_for(wait) == std::future_status::ready) return result.get();

  std::string token = "job-" + std::to_string(next_job_++);
  {
    std::lock_guard<std::mutex> lock(jobs_mu_);
    jobs_[token] = Job{result};
  }
  ServiceResponse r = Ok({{"job", token}, {"status", "running"}}, 202);
  r.retry_after = 1;
  return r;
}

ServiceResponse Service::job(const std::string &token) {
  std::shared_future<ServiceResponse> result;
  {
    std::lock_guard<std::mutex> lock(jobs_mu_);
    auto it = jobs_.find(token);
    if (it == jobs_.end()) return Error(404, "not_found", "unknown job '" + token + "'");
    result = it->second.result;
  }
  if (result.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    ServiceResponse r = Ok({{"job", token}, {"status", "running"}});
    r.retry_after = 1;
    return r;
  }
  const ServiceResponse &done = result.get();
  json body = {{"job", token},
               {"status", done.status == 200 ? "done" : "failed"},
               {"http_status", done.status},
               {"result", done.body}};
  return Ok(std::move(body));
}

ServiceResponse Service::theorem(const std::string &id) const {
  auto value = ParseLong(id);
  const Reference *page = value ? corpus_.find_by_id(static_cast<int>(*value)) : nullptr;
  if (!page) return Error(404, "not_found", "unknown reference id '" + id + "'");
  return Ok(ReferenceJson(*page, corpus_));
}

ServiceResponse Service::search(const std::string &query, const std::string &page,
                                const std::string &page_size,
                                const std::string &kind) const {
  long page_no = 1;
  long size = config_.default_page_size;
  if (!page.empty()) {
    auto v = ParseLong(page);
    if (!v || *v < 1) return Error(422, "invalid_request", "page must be a positive integer");
    page_no = *v;
  }
  if (!page_size.empty()) {
    auto v = ParseLong(page_size);
    if (!v || *v < 1 || *v > config_.max_page_size) {
      return Error(422, "invalid_request",
                   "page_size must lie in 1.." + std::to_string(config_.max_page_size));
    }
    size = *v;
  }
  bool any_kind = kind.empty() || kind == "all";
  ReferenceKind wanted = ReferenceKind::kTheorem;
  if (!kind.empty() && !any_kind) {
    auto parsed = ParseReferenceKind(kind);
    if (!parsed) return Error(422, "invalid_request", "unknown kind '" + kind + "'");
    wanted = *parsed;
  }

  std::string needle = ToLower(normalize_title(query));
  std::vector<const Reference *> hits;
  for (const Reference &r : corpus_.references()) {
    if (!any_kind && r.kind != wanted) continue;
    if (!needle.empty() && ToLower(normalize_title(r.title)).find(needle) == std::string::npos) {
      continue;
    }
    hits.push_back(&r);
  }
  std::sort(hits.begin(), hits.end(),
            [](const Reference *a, const Reference *b) { return a->id < b->id; });
  json results = json::array();
  size_t begin = static_cast<size_t>((page_no - 1) * size);
  for (size_t i = begin; i < hits.size() && i < begin + static_cast<size_t>(size); ++i) {
    results.push_back({{"id", hits[i]->id},
                       {"kind", ReferenceKindName(hits[i]->kind)},
                       {"title", hits[i]->title},
                       {"has_proof", corpus_.find_example(hits[i]->id) != nullptr}});
  }
  return Ok({{"query", query},
             {"page", page_no},
             {"page_size", size},
             {"total", hits.size()},
             {"results", results}});
}

namespace {

void Reply(httplib::Response &res, const ServiceResponse &r) {
  res.status = r.status;
  if (r.retry_after) res.set_header("Retry-After", std::to_string(*r.retry_after));
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

void Service::install(httplib::Server &server) {
  server.Get("/health",
             [this](const httplib::Request &, httplib::Response &res) { Reply(res, health()); });
  server.Post("/v1/suggest", [this](const httplib::Request &req, httplib::Response &res) {
    Reply(res, suggest(req.body));
  });
  server.Post("/v1/prove", [this](const httplib::Request &req, httplib::Response &res) {
    Reply(res, prove(req.body));
  });
  server.Get(R"(/v1/jobs/([^/]+))", [this](const httplib::Request &req,
                                           httplib::Response &res) {
    Reply(res, job(req.matches[1]));
  });
  server.Get(R"(/v1/theorems/([^/]+))", [this](const httplib::Request &req,
                                               httplib::Response &res) {
    Reply(res, theorem(req.matches[1]));
  });
  server.Get("/v1/theorems", [this](const httplib::Request &req, httplib::Response &res) {
    Reply(res, search(req.get_param_value("query"), req.get_param_value("page"),
                      req.get_param_value("page_size"), req.get_param_value("kind")));
  });
  server.set_error_handler([](const httplib::Request &, httplib::Response &res) {
    if (!res.body.empty()) return;
    ServiceResponse r = Error(res.status, res.status == 404 ? "not_found" : "http_error",
                              "no route for this request");
    res.set_content(r.body.dump(), "application/json");
  });
}

bool serve(Service &service, const std::string &host, int port) {
  httplib::Server server;
  service.install(server);
  return server.listen(host, port);
}

}  // namespace groundproof
