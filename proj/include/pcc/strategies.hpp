#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcc/backends.hpp"
#include "pcc/router.hpp"
#include "pcc/signals.hpp"

namespace pcc {

struct VerificationResult {
  std::string claim_id;
  std::optional<bool> verdict;  // absent = unverified
  Strategy strategy = Strategy::DirectAnswer;
  ConfidenceSignals signals;
  std::vector<std::string> queries;
  std::vector<EvidenceSnippet> evidence;
  int llm_calls = 0;
  int search_calls = 0;
  int nli_calls = 0;
  int iterations = 0;  // deep search only
  bool empty_evidence_warning = false;
  std::string error;

  nlohmann::json to_json() const;
};

// Numbered "[n] title — snippet (url)" lines under an EVIDENCE header.
std::string format_evidence_context(const std::vector<EvidenceSnippet>& evidence);

// Strict JSON extraction of a field, tolerating surrounding prose.
std::optional<std::string> extract_json_field(const std::string& text, const std::string& field);

// Executes the four verification procedures against a backend set.
class StrategyExecutor {
 public:
  // search may be null when only direct_answer will be used
  StrategyExecutor(LlmBackend& llm, SearchBackend* search, const PromptLibrary& prompts,
                   int search_k, int deep_budget);

  VerificationResult direct_answer(const std::string& claim_id,
                                   const ConfidenceSignals& signals);

  VerificationResult targeted_contradiction(const std::string& claim_id, const std::string& claim,
                                            const ConfidenceSignals& signals,
                                            const ContradictionMatrix& matrix,
                                            const RationaleSet& rationales);

  VerificationResult targeted_reflection(const std::string& claim_id, const std::string& claim,
                                         const ConfidenceSignals& signals);

  VerificationResult deep_search(const std::string& claim_id, const std::string& claim,
                                 const ConfidenceSignals& signals, int budget);

 private:
  // Evidence-conditioned final verdict: JSON parse, one reprompt, then a
  // case-insensitive label scan; unverified when everything fails.
  void issue_verdict(VerificationResult& result, const std::string& claim);

  std::string llm_text(const std::string& prompt, VerificationResult& result,
                       int sample_index = 0, double temperature = 0.0);

  LlmBackend& llm_;
  SearchBackend* search_;
  const PromptLibrary& prompts_;
  int search_k_;
  int deep_budget_;
};

}  // namespace pcc
