#pragma once

#include <atomic>
#include <condition_variable>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcc/cache.hpp"
#include "pcc/prompts.hpp"
#include "pcc/signals.hpp"

namespace pcc {

enum class ExecutionMode { Live, Record, Replay };

ExecutionMode parse_mode(const std::string& name);
const char* mode_name(ExecutionMode mode);

struct LlmRequest {
  std::string prompt;
  int max_tokens = 256;
  double temperature = 0.0;
  bool want_logprobs = false;
  int top_k_logprobs = 0;
  int sample_index = 0;  // disambiguates repeated samples of one prompt

  nlohmann::json to_json() const;
};

struct LlmResponse {
  std::string text;
  std::optional<TokenDistribution> distribution;  // first generated token position

  nlohmann::json to_json() const;
  static LlmResponse from_json(const nlohmann::json& j);
};

struct NliJudgment {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;

  nlohmann::json to_json() const;
  static NliJudgment from_json(const nlohmann::json& j);
};

struct EvidenceSnippet {
  std::string title;
  std::string url;
  std::string snippet;
  int rank = 0;

  nlohmann::json to_json() const;
  static EvidenceSnippet from_json(const nlohmann::json& j);
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
  virtual std::string model_id() const = 0;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual NliJudgment classify(const std::string& premise, const std::string& hypothesis) = 0;
  virtual std::string model_id() const = 0;
  // Approximate whitespace-token budget for premise + hypothesis combined.
  virtual int token_budget() const { return 512; }
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::vector<EvidenceSnippet> search(const std::string& query, int k) = 0;
  virtual std::string model_id() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted mocks. Deterministic; every call is counted.

class MockLlmBackend : public LlmBackend {
 public:
  // First entry whose substrings all occur in the prompt wins.
  // responses[min(sample_index, size-1)] is returned.
  void script(const std::string& contains, std::vector<LlmResponse> responses);
  void script(const std::string& contains, const LlmResponse& response);
  // distinct name: a braced list of two literals would otherwise also match
  // std::string's iterator-pair constructor
  void script_all(std::vector<std::string> contains_all, std::vector<LlmResponse> responses);

  LlmResponse complete(const LlmRequest& request) override;
  std::string model_id() const override { return "mock-llm"; }

  int calls() const { return calls_.load(); }
  std::vector<std::string> seen_prompts() const;

 private:
  struct Entry {
    std::vector<std::string> contains_all;
    std::vector<LlmResponse> responses;
  };
  std::vector<Entry> entries_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<std::string> prompts_;
};

class MockNliBackend : public NliBackend {
 public:
  void script(const std::string& premise_contains, const std::string& hypothesis_contains,
              NliJudgment judgment);
  void set_default(NliJudgment judgment) { default_ = judgment; }

  NliJudgment classify(const std::string& premise, const std::string& hypothesis) override;
  std::string model_id() const override { return "mock-nli"; }
  int calls() const { return calls_.load(); }

 private:
  struct Entry {
    std::string premise_contains;
    std::string hypothesis_contains;
    NliJudgment judgment;
  };
  std::vector<Entry> entries_;
  NliJudgment default_{0.90, 0.08, 0.02};
  std::atomic<int> calls_{0};
};

class MockSearchBackend : public SearchBackend {
 public:
  void script(const std::string& query_contains, std::vector<EvidenceSnippet> snippets);

  std::vector<EvidenceSnippet> search(const std::string& query, int k) override;
  std::string model_id() const override { return "mock-search"; }
  int calls() const { return calls_.load(); }

 private:
  struct Entry {
    std::string query_contains;
    std::vector<EvidenceSnippet> snippets;
  };
  std::vector<Entry> entries_;
  std::atomic<int> calls_{0};
};

// ---------------------------------------------------------------------------
// Cache-through wrappers implementing live / record / replay semantics.
// In replay mode the inner backend may be null; a miss raises ReplayMiss.

class CachedLlmBackend : public LlmBackend {
 public:
  CachedLlmBackend(std::shared_ptr<LlmBackend> inner, std::shared_ptr<ResponseCache> cache,
                   ExecutionMode mode, std::string model_id);
  LlmResponse complete(const LlmRequest& request) override;
  std::string model_id() const override { return model_id_; }

 private:
  std::shared_ptr<LlmBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  ExecutionMode mode_;
  std::string model_id_;
};

class CachedNliBackend : public NliBackend {
 public:
  CachedNliBackend(std::shared_ptr<NliBackend> inner, std::shared_ptr<ResponseCache> cache,
                   ExecutionMode mode, std::string model_id);
  NliJudgment classify(const std::string& premise, const std::string& hypothesis) override;
  std::string model_id() const override { return model_id_; }
  int token_budget() const override { return inner_ ? inner_->token_budget() : 512; }

 private:
  std::shared_ptr<NliBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  ExecutionMode mode_;
  std::string model_id_;
};

class CachedSearchBackend : public SearchBackend {
 public:
  CachedSearchBackend(std::shared_ptr<SearchBackend> inner, std::shared_ptr<ResponseCache> cache,
                      ExecutionMode mode, std::string model_id);
  std::vector<EvidenceSnippet> search(const std::string& query, int k) override;
  std::string model_id() const override { return model_id_; }

 private:
  std::shared_ptr<SearchBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  ExecutionMode mode_;
  std::string model_id_;
};

// ---------------------------------------------------------------------------
// HTTP clients. Chat-completions-style LLM protocol with a logprobs option,
// a three-class NLI inference protocol, and a JSON search protocol.

struct RetryPolicy {
  int attempts = 3;
  int base_delay_ms = 500;
};

struct HttpEndpoint {
  std::string url;          // e.g. http://host:port/v1/chat/completions
  std::string model;        // model id sent with each request
  std::string api_key_env;  // name of env var holding the key; empty = none
};

class HttpLlmBackend : public LlmBackend {
 public:
  HttpLlmBackend(HttpEndpoint endpoint, RetryPolicy retry = {}, int max_in_flight = 4);
  LlmResponse complete(const LlmRequest& request) override;
  std::string model_id() const override { return endpoint_.model; }

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
  std::shared_ptr<class ConcurrencyLimit> limit_;
};

class HttpNliBackend : public NliBackend {
 public:
  HttpNliBackend(HttpEndpoint endpoint, RetryPolicy retry = {}, int max_in_flight = 4,
                 int token_budget = 512);
  NliJudgment classify(const std::string& premise, const std::string& hypothesis) override;
  std::string model_id() const override { return endpoint_.model; }
  int token_budget() const override { return token_budget_; }

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
  std::shared_ptr<class ConcurrencyLimit> limit_;
  int token_budget_;
};

class HttpSearchBackend : public SearchBackend {
 public:
  HttpSearchBackend(HttpEndpoint endpoint, RetryPolicy retry = {}, int max_in_flight = 4);
  std::vector<EvidenceSnippet> search(const std::string& query, int k) override;
  std::string model_id() const override { return endpoint_.model; }

 private:
  HttpEndpoint endpoint_;
  RetryPolicy retry_;
  std::shared_ptr<class ConcurrencyLimit> limit_;
};

// ---------------------------------------------------------------------------
// High-level operations shared by all backend kinds.

// Renders the verdict prompt and requests one token with logprobs at
// temperature 0. Throws LogprobsUnsupported when no distribution comes back.
TokenDistribution llm_verdict_distribution(LlmBackend& llm, const PromptLibrary& prompts,
                                           const std::string& claim, int top_k = 10);

// k sampled rationales from the supporting or refuting template.
std::vector<std::string> llm_rationales(LlmBackend& llm, const PromptLibrary& prompts,
                                        const std::string& claim, bool supporting, int k,
                                        double temperature = 0.7);

// Truncates both texts to the backend's token budget (split evenly) and
// renormalizes near-simplex outputs; sums outside [0.5, 2] are rejected.
NliJudgment nli_classify(NliBackend& nli, const std::string& premise,
                         const std::string& hypothesis, bool* truncated = nullptr);

std::vector<EvidenceSnippet> web_search(SearchBackend& search, const std::string& query, int k);

// Full 2K^2-call contradiction grid over a rationale set.
ContradictionMatrix contradiction_matrix(NliBackend& nli, const RationaleSet& rationales,
                                         int* nli_calls = nullptr);

std::string truncate_words(const std::string& text, int max_words);

}  // namespace pcc
