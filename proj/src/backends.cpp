#include "pcc/backends.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "pcc/errors.hpp"

namespace pcc {

ExecutionMode parse_mode(const std::string& name) {
  if (name == "live") return ExecutionMode::Live;
  if (name == "record") return ExecutionMode::Record;
  if (name == "replay") return ExecutionMode::Replay;
  throw ConfigError("unknown execution mode: " + name);
}

const char* mode_name(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::Live: return "live";
    case ExecutionMode::Record: return "record";
    case ExecutionMode::Replay: return "replay";
  }
  return "unknown";
}

nlohmann::json LlmRequest::to_json() const {
  return {{"prompt", prompt},
          {"max_tokens", max_tokens},
          {"temperature", temperature},
          {"want_logprobs", want_logprobs},
          {"top_k_logprobs", top_k_logprobs},
          {"sample_index", sample_index}};
}

nlohmann::json LlmResponse::to_json() const {
  nlohmann::json j{{"text", text}};
  if (distribution) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [tok, p] : distribution->entries) {
      entries.push_back({{"token", tok}, {"probability", p}});
    }
    j["distribution"] = entries;
  }
  return j;
}

LlmResponse LlmResponse::from_json(const nlohmann::json& j) {
  LlmResponse r;
  r.text = j.value("text", "");
  if (j.contains("distribution")) {
    TokenDistribution d;
    for (const auto& e : j["distribution"]) {
      d.entries.emplace_back(e.at("token").get<std::string>(), e.at("probability").get<double>());
    }
    r.distribution = std::move(d);
  }
  return r;
}

nlohmann::json NliJudgment::to_json() const {
  return {{"entailment", entailment}, {"neutral", neutral}, {"contradiction", contradiction}};
}

NliJudgment NliJudgment::from_json(const nlohmann::json& j) {
  return {j.at("entailment").get<double>(), j.at("neutral").get<double>(),
          j.at("contradiction").get<double>()};
}

nlohmann::json EvidenceSnippet::to_json() const {
  return {{"title", title}, {"url", url}, {"snippet", snippet}, {"rank", rank}};
}

EvidenceSnippet EvidenceSnippet::from_json(const nlohmann::json& j) {
  return {j.value("title", ""), j.value("url", ""), j.value("snippet", ""), j.value("rank", 0)};
}

// ---------------------------------------------------------------------------
// Mocks

void MockLlmBackend::script(const std::string& contains, std::vector<LlmResponse> responses) {
  entries_.push_back({{contains}, std::move(responses)});
}

void MockLlmBackend::script(const std::string& contains, const LlmResponse& response) {
  entries_.push_back({{contains}, {response}});
}

void MockLlmBackend::script_all(std::vector<std::string> contains_all,
                                std::vector<LlmResponse> responses) {
  entries_.push_back({std::move(contains_all), std::move(responses)});
}

LlmResponse MockLlmBackend::complete(const LlmRequest& request) {
  calls_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lock(mu_);
    prompts_.push_back(request.prompt);
  }
  for (const auto& entry : entries_) {
    const bool match = std::all_of(entry.contains_all.begin(), entry.contains_all.end(),
                                   [&](const std::string& needle) {
                                     return request.prompt.find(needle) != std::string::npos;
                                   });
    if (match) {
      const std::size_t idx =
          std::min<std::size_t>(request.sample_index, entry.responses.size() - 1);
      return entry.responses[idx];
    }
  }
  throw BackendUnavailable("mock llm: no script entry matches prompt");
}

std::vector<std::string> MockLlmBackend::seen_prompts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_;
}

void MockNliBackend::script(const std::string& premise_contains,
                            const std::string& hypothesis_contains, NliJudgment judgment) {
  entries_.push_back({premise_contains, hypothesis_contains, judgment});
}

NliJudgment MockNliBackend::classify(const std::string& premise, const std::string& hypothesis) {
  calls_.fetch_add(1);
  for (const auto& entry : entries_) {
    if (premise.find(entry.premise_contains) != std::string::npos &&
        hypothesis.find(entry.hypothesis_contains) != std::string::npos) {
      return entry.judgment;
    }
  }
  return default_;
}

void MockSearchBackend::script(const std::string& query_contains,
                               std::vector<EvidenceSnippet> snippets) {
  entries_.push_back({query_contains, std::move(snippets)});
}

std::vector<EvidenceSnippet> MockSearchBackend::search(const std::string& query, int k) {
  calls_.fetch_add(1);
  for (const auto& entry : entries_) {
    if (query.find(entry.query_contains) != std::string::npos) {
      std::vector<EvidenceSnippet> out = entry.snippets;
      if (static_cast<int>(out.size()) > k) out.resize(k);
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Cache wrappers

namespace {

nlohmann::json cached_call(const std::shared_ptr<ResponseCache>& cache, ExecutionMode mode,
                           const std::string& backend_id, const std::string& model_id,
                           const nlohmann::json& request,
                           const std::function<nlohmann::json()>& invoke) {
  const CacheKey key = CacheKey::make(backend_id, model_id, request);
  if (cache) {
    if (auto hit = cache->lookup(key)) return *hit;
    if (mode == ExecutionMode::Replay) {
      throw ReplayMiss("replay miss for " + backend_id + " key " + key.digest);
    }
  } else if (mode == ExecutionMode::Replay) {
    throw ReplayMiss("replay mode without a cache directory");
  }
  nlohmann::json response = invoke();
  if (cache) cache->store(key, backend_id, model_id, request, response);
  return response;
}

}  // namespace

CachedLlmBackend::CachedLlmBackend(std::shared_ptr<LlmBackend> inner,
                                   std::shared_ptr<ResponseCache> cache, ExecutionMode mode,
                                   std::string model_id)
    : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode),
      model_id_(std::move(model_id)) {}

LlmResponse CachedLlmBackend::complete(const LlmRequest& request) {
  nlohmann::json response =
      cached_call(cache_, mode_, "llm", model_id_, request.to_json(), [&] {
        if (!inner_) throw BackendUnavailable("no live llm backend configured");
        return inner_->complete(request).to_json();
      });
  return LlmResponse::from_json(response);
}

CachedNliBackend::CachedNliBackend(std::shared_ptr<NliBackend> inner,
                                   std::shared_ptr<ResponseCache> cache, ExecutionMode mode,
                                   std::string model_id)
    : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode),
      model_id_(std::move(model_id)) {}

NliJudgment CachedNliBackend::classify(const std::string& premise, const std::string& hypothesis) {
  nlohmann::json request{{"premise", premise}, {"hypothesis", hypothesis}};
  nlohmann::json response = cached_call(cache_, mode_, "nli", model_id_, request, [&] {
    if (!inner_) throw BackendUnavailable("no live nli backend configured");
    return inner_->classify(premise, hypothesis).to_json();
  });
  return NliJudgment::from_json(response);
}

CachedSearchBackend::CachedSearchBackend(std::shared_ptr<SearchBackend> inner,
                                         std::shared_ptr<ResponseCache> cache, ExecutionMode mode,
                                         std::string model_id)
    : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode),
      model_id_(std::move(model_id)) {}

std::vector<EvidenceSnippet> CachedSearchBackend::search(const std::string& query, int k) {
  nlohmann::json request{{"query", query}, {"k", k}};
  nlohmann::json response = cached_call(cache_, mode_, "search", model_id_, request, [&] {
    if (!inner_) throw BackendUnavailable("no live search backend configured");
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& s : inner_->search(query, k)) hits.push_back(s.to_json());
    return hits;
  });
  std::vector<EvidenceSnippet> out;
  for (const auto& j : response) out.push_back(EvidenceSnippet::from_json(j));
  return out;
}

// ---------------------------------------------------------------------------
// HTTP clients

class ConcurrencyLimit {
 public:
  explicit ConcurrencyLimit(int max_in_flight) : available_(max_in_flight) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

namespace {

struct LimitGuard {
  explicit LimitGuard(ConcurrencyLimit& l) : limit(l) { limit.acquire(); }
  ~LimitGuard() { limit.release(); }
  ConcurrencyLimit& limit;
};

// Splits a full URL into client base ("scheme://host:port") and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint url missing scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string api_key_from_env(const std::string& env_name) {
  if (env_name.empty()) return "";
  const char* value = std::getenv(env_name.c_str());
  return value ? value : "";
}

// POSTs JSON with bounded retries and exponential backoff on transport
// failures and 5xx responses. 429 becomes QuotaExceeded.
nlohmann::json post_json(const HttpEndpoint& endpoint, const RetryPolicy& retry,
                         const nlohmann::json& body, const std::string& key_header) {
  const auto [base, path] = split_url(endpoint.url);
  const std::string key = api_key_from_env(endpoint.api_key_env);
  std::string last_error;
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(retry.base_delay_ms * (1 << (attempt - 1))));
    }
    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!key.empty()) {
      if (key_header == "Authorization") headers.emplace("Authorization", "Bearer " + key);
      else headers.emplace(key_header, key);
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error (attempt " + std::to_string(attempt + 1) + ")";
      continue;
    }
    if (res->status == 429) throw QuotaExceeded("rate limited by " + endpoint.url);
    if (res->status >= 500) {
      last_error = "status " + std::to_string(res->status) + " (attempt " +
                   std::to_string(attempt + 1) + ")";
      continue;
    }
    if (res->status != 200) {
      throw BackendUnavailable("http " + std::to_string(res->status) + " from " + endpoint.url +
                               ": " + res->body);
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      throw BackendUnavailable("unparseable response from " + endpoint.url);
    }
    return parsed;
  }
  throw BackendUnavailable("giving up on " + endpoint.url + ": " + last_error);
}

}  // namespace

HttpLlmBackend::HttpLlmBackend(HttpEndpoint endpoint, RetryPolicy retry, int max_in_flight)
    : endpoint_(std::move(endpoint)), retry_(retry),
      limit_(std::make_shared<ConcurrencyLimit>(max_in_flight)) {}

LlmResponse HttpLlmBackend::complete(const LlmRequest& request) {
  LimitGuard guard(*limit_);
  nlohmann::json body{{"model", endpoint_.model},
                      {"messages", nlohmann::json::array({nlohmann::json{
                                       {"role", "user"}, {"content", request.prompt}}})},
                      {"max_tokens", request.max_tokens},
                      {"temperature", request.temperature}};
  if (request.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = request.top_k_logprobs;
  }
  nlohmann::json res = post_json(endpoint_, retry_, body, "Authorization");
  if (!res.contains("choices") || res["choices"].empty()) {
    throw BackendUnavailable("llm response has no choices");
  }
  const auto& choice = res["choices"][0];
  LlmResponse out;
  if (choice.contains("message")) out.text = choice["message"].value("content", "");
  if (request.want_logprobs) {
    if (!choice.contains("logprobs") || choice["logprobs"].is_null() ||
        !choice["logprobs"].contains("content") || choice["logprobs"]["content"].empty()) {
      throw LogprobsUnsupported("backend returned no token logprobs");
    }
    TokenDistribution dist;
    for (const auto& alt : choice["logprobs"]["content"][0]["top_logprobs"]) {
      dist.entries.emplace_back(alt.at("token").get<std::string>(),
                                std::exp(alt.at("logprob").get<double>()));
    }
    std::stable_sort(dist.entries.begin(), dist.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    out.distribution = std::move(dist);
  }
  return out;
}

HttpNliBackend::HttpNliBackend(HttpEndpoint endpoint, RetryPolicy retry, int max_in_flight,
                               int token_budget)
    : endpoint_(std::move(endpoint)), retry_(retry),
      limit_(std::make_shared<ConcurrencyLimit>(max_in_flight)), token_budget_(token_budget) {}

NliJudgment HttpNliBackend::classify(const std::string& premise, const std::string& hypothesis) {
  LimitGuard guard(*limit_);
  nlohmann::json body{{"model", endpoint_.model}, {"premise", premise},
                      {"hypothesis", hypothesis}};
  nlohmann::json res = post_json(endpoint_, retry_, body, "Authorization");
  if (!res.contains("entailment") || !res.contains("neutral") || !res.contains("contradiction")) {
    throw BackendUnavailable("nli response missing class scores");
  }
  return NliJudgment::from_json(res);
}

HttpSearchBackend::HttpSearchBackend(HttpEndpoint endpoint, RetryPolicy retry, int max_in_flight)
    : endpoint_(std::move(endpoint)), retry_(retry),
      limit_(std::make_shared<ConcurrencyLimit>(max_in_flight)) {}

std::vector<EvidenceSnippet> HttpSearchBackend::search(const std::string& query, int k) {
  LimitGuard guard(*limit_);
  nlohmann::json body{{"q", query}, {"num", k}};
  nlohmann::json res = post_json(endpoint_, retry_, body, "X-API-KEY");
  std::vector<EvidenceSnippet> out;
  if (res.contains("organic")) {
    for (const auto& hit : res["organic"]) {
      if (static_cast<int>(out.size()) >= k) break;
      EvidenceSnippet s;
      s.title = hit.value("title", "");
      s.url = hit.value("link", hit.value("url", ""));
      s.snippet = hit.value("snippet", "");
      s.rank = hit.value("position", static_cast<int>(out.size()) + 1);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// High-level operations

TokenDistribution llm_verdict_distribution(LlmBackend& llm, const PromptLibrary& prompts,
                                           const std::string& claim, int top_k) {
  LlmRequest req;
  req.prompt = prompts.render(TemplateId::VerdictToken, {{"statement", claim}});
  req.max_tokens = 1;
  req.temperature = 0.0;
  req.want_logprobs = true;
  req.top_k_logprobs = std::max(top_k, 2);
  LlmResponse res = llm.complete(req);
  if (!res.distribution) throw LogprobsUnsupported("verdict call returned no distribution");
  return *res.distribution;
}

std::vector<std::string> llm_rationales(LlmBackend& llm, const PromptLibrary& prompts,
                                        const std::string& claim, bool supporting, int k,
                                        double temperature) {
  const TemplateId id = supporting ? TemplateId::RationaleTrue : TemplateId::RationaleFalse;
  LlmRequest req;
  req.prompt = prompts.render(id, {{"claim", claim}});
  req.max_tokens = 256;
  req.temperature = temperature;
  std::vector<std::string> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    req.sample_index = i;
    out.push_back(llm.complete(req).text);
  }
  return out;
}

std::string truncate_words(const std::string& text, int max_words) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string word;
  int n = 0;
  while (n < max_words && in >> word) {
    if (n) out << ' ';
    out << word;
    ++n;
  }
  std::string result = out.str();
  // only counts as truncation if words were actually dropped
  if (in >> word) return result;
  return text;
}

NliJudgment nli_classify(NliBackend& nli, const std::string& premise,
                         const std::string& hypothesis, bool* truncated) {
  const int per_text = std::max(1, nli.token_budget() / 2);
  const std::string p = truncate_words(premise, per_text);
  const std::string h = truncate_words(hypothesis, per_text);
  if (truncated) *truncated = (p != premise) || (h != hypothesis);
  NliJudgment j = nli.classify(p, h);
  const double sum = j.entailment + j.neutral + j.contradiction;
  if (std::fabs(sum - 1.0) > 1e-6) {
    if (sum < 0.5 || sum > 2.0) {
      throw BackendUnavailable("nli scores far from simplex (sum " + std::to_string(sum) + ")");
    }
    j.entailment /= sum;
    j.neutral /= sum;
    j.contradiction /= sum;
  }
  return j;
}

std::vector<EvidenceSnippet> web_search(SearchBackend& search, const std::string& query, int k) {
  std::vector<EvidenceSnippet> out = search.search(query, k);
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

ContradictionMatrix contradiction_matrix(NliBackend& nli, const RationaleSet& rationales,
                                         int* nli_calls) {
  const std::size_t k = rationales.k();
  std::vector<std::vector<double>> forward(k, std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> backward(k, std::vector<double>(k, 0.0));
  int calls = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      forward[i][j] =
          nli_classify(nli, rationales.supporting[i], rationales.refuting[j]).contradiction;
      backward[i][j] =
          nli_classify(nli, rationales.refuting[j], rationales.supporting[i]).contradiction;
      calls += 2;
    }
  }
  if (nli_calls) *nli_calls = calls;
  return ContradictionMatrix::from_raw(std::move(forward), std::move(backward));
}

}  // namespace pcc
