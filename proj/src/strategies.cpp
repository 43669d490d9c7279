#include "pcc/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "pcc/errors.hpp"

namespace pcc {

nlohmann::json VerificationResult::to_json() const {
  nlohmann::json j{{"claim_id", claim_id},
                   {"strategy", strategy_name(strategy)},
                   {"verdict", verdict ? nlohmann::json(*verdict ? "True" : "False")
                                       : nlohmann::json(nullptr)},
                   {"signals",
                    {{"certainty", signals.certainty},
                     {"consistency", signals.consistency},
                     {"pcc", signals.pcc},
                     {"p_true", signals.class_prob_true},
                     {"p_false", signals.class_prob_false},
                     {"margin", signals.margin}}},
                   {"queries", queries},
                   {"llm_calls", llm_calls},
                   {"search_calls", search_calls},
                   {"nli_calls", nli_calls},
                   {"iterations", iterations},
                   {"empty_evidence_warning", empty_evidence_warning}};
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& s : evidence) ev.push_back(s.to_json());
  j["evidence"] = ev;
  if (!error.empty()) j["error"] = error;
  return j;
}

std::string format_evidence_context(const std::vector<EvidenceSnippet>& evidence) {
  std::ostringstream out;
  out << "EVIDENCE:\n";
  if (evidence.empty()) {
    out << "(no evidence found)\n";
  } else {
    int n = 1;
    for (const auto& s : evidence) {
      out << "[" << n++ << "] " << s.title << " — " << s.snippet << " (" << s.url << ")\n";
    }
  }
  return out.str();
}

std::optional<std::string> extract_json_field(const std::string& text, const std::string& field) {
  auto get_field = [&](const nlohmann::json& j) -> std::optional<std::string> {
    if (j.is_object() && j.contains(field) && j[field].is_string()) {
      return j[field].get<std::string>();
    }
    return std::nullopt;
  };
  nlohmann::json whole = nlohmann::json::parse(text, nullptr, false);
  if (!whole.is_discarded()) {
    if (auto v = get_field(whole)) return v;
  }
  // responses often wrap the JSON object in reasoning prose
  const std::size_t open = text.find('{');
  const std::size_t close = text.rfind('}');
  if (open != std::string::npos && close != std::string::npos && close > open) {
    nlohmann::json inner =
        nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
    if (!inner.is_discarded()) {
      if (auto v = get_field(inner)) return v;
    }
  }
  return std::nullopt;
}

StrategyExecutor::StrategyExecutor(LlmBackend& llm, SearchBackend* search,
                                   const PromptLibrary& prompts, int search_k, int deep_budget)
    : llm_(llm), search_(search), prompts_(prompts), search_k_(search_k),
      deep_budget_(deep_budget) {}

std::string StrategyExecutor::llm_text(const std::string& prompt, VerificationResult& result,
                                       int sample_index, double temperature) {
  LlmRequest req;
  req.prompt = prompt;
  req.max_tokens = 512;
  req.temperature = temperature;
  req.sample_index = sample_index;
  ++result.llm_calls;
  return llm_.complete(req).text;
}

namespace {

std::optional<bool> label_from_text(const std::string& value) {
  const std::string norm = normalize_token(value);
  if (norm == "true") return true;
  if (norm == "false") return false;
  return std::nullopt;
}

// case-insensitive substring scan for the label tokens
std::optional<bool> label_scan(const std::string& text) {
  std::string lower(text.size(), '\0');
  std::transform(text.begin(), text.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto t = lower.find("true");
  const auto f = lower.find("false");
  if (t == std::string::npos && f == std::string::npos) return std::nullopt;
  if (f == std::string::npos) return true;
  if (t == std::string::npos) return false;
  return t < f;  // whichever label appears first
}

}  // namespace

void StrategyExecutor::issue_verdict(VerificationResult& result, const std::string& claim) {
  if (result.evidence.empty()) result.empty_evidence_warning = true;
  const std::string body = prompts_.render(TemplateId::DeepVerdict, {{"statement", claim}});
  const std::string prompt = format_evidence_context(result.evidence) + "\n" + body;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string text = llm_text(prompt, result, attempt);
    if (auto raw = extract_json_field(text, "final_answer")) {
      if (auto verdict = label_from_text(*raw)) {
        result.verdict = verdict;
        return;
      }
    }
    if (attempt == 1) {
      // last resort: scan the raw response for the labels
      if (auto verdict = label_scan(text)) {
        result.verdict = verdict;
        return;
      }
    }
  }
  result.error = "verdict response unparseable";
}

VerificationResult StrategyExecutor::direct_answer(const std::string& claim_id,
                                                   const ConfidenceSignals& signals) {
  VerificationResult result;
  result.claim_id = claim_id;
  result.strategy = Strategy::DirectAnswer;
  result.signals = signals;
  // tie resolves to False
  result.verdict = signals.class_prob_true > signals.class_prob_false;
  return result;
}

VerificationResult StrategyExecutor::targeted_contradiction(const std::string& claim_id,
                                                            const std::string& claim,
                                                            const ConfidenceSignals& signals,
                                                            const ContradictionMatrix& matrix,
                                                            const RationaleSet& rationales) {
  VerificationResult result;
  result.claim_id = claim_id;
  result.strategy = Strategy::TargetedContradiction;
  result.signals = signals;

  const auto [i, j] = most_contradictory_pair(matrix);
  const std::string prompt = prompts_.render(
      TemplateId::TargetedQuery,
      {{"premise", rationales.supporting[i]}, {"hypothesis", rationales.refuting[j]}});
  std::string query = llm_text(prompt, result);
  // the template asks for the bare query; trim whatever whitespace remains
  while (!query.empty() && std::isspace(static_cast<unsigned char>(query.back()))) query.pop_back();
  while (!query.empty() && std::isspace(static_cast<unsigned char>(query.front()))) {
    query.erase(query.begin());
  }
  result.queries.push_back(query);
  result.evidence = web_search(*search_, query, search_k_);
  ++result.search_calls;
  issue_verdict(result, claim);
  return result;
}

VerificationResult StrategyExecutor::targeted_reflection(const std::string& claim_id,
                                                         const std::string& claim,
                                                         const ConfidenceSignals& signals) {
  VerificationResult result;
  result.claim_id = claim_id;
  result.strategy = Strategy::TargetedReflection;
  result.signals = signals;

  const std::string prompt = prompts_.render(TemplateId::ReflectionQuery, {{"statement", claim}});
  std::optional<std::string> query;
  for (int attempt = 0; attempt < 2 && !query; ++attempt) {
    query = extract_json_field(llm_text(prompt, result, attempt), "search_query");
  }
  if (!query) {
    result.error = "reflection response is not valid JSON with a search_query field";
    return result;  // unverified
  }
  result.queries.push_back(*query);
  result.evidence = web_search(*search_, *query, search_k_);
  ++result.search_calls;
  issue_verdict(result, claim);
  return result;
}

VerificationResult StrategyExecutor::deep_search(const std::string& claim_id,
                                                 const std::string& claim,
                                                 const ConfidenceSignals& signals, int budget) {
  VerificationResult result;
  result.claim_id = claim_id;
  result.strategy = Strategy::DeepSearch;
  result.signals = signals;
  if (budget < 1) budget = deep_budget_;

  for (int iter = 0; iter < budget; ++iter) {
    result.iterations = iter + 1;

    std::ostringstream query_prompt;
    if (!result.evidence.empty()) query_prompt << format_evidence_context(result.evidence) << "\n";
    query_prompt << "You are fact-checking the STATEMENT below. Based on what is still unknown"
                 << (result.evidence.empty() ? "" : " given the evidence above")
                 << ", write a concise web search query that would help verify it.\n"
                 << "Return only the search query.\n\nSTATEMENT: " << claim;
    std::string query = llm_text(query_prompt.str(), result, iter);
    result.queries.push_back(query);

    auto hits = web_search(*search_, query, search_k_);
    ++result.search_calls;
    for (auto& h : hits) {
      h.rank = static_cast<int>(result.evidence.size()) + 1;
      result.evidence.push_back(std::move(h));
    }

    std::ostringstream probe;
    probe << format_evidence_context(result.evidence) << "\n"
          << "STATEMENT: " << claim << "\n\n"
          << "Is the evidence collected so far sufficient to decide whether the statement is "
             "true or false? Answer with exactly one word: \"sufficient\" or \"insufficient\".";
    std::string answer = llm_text(probe.str(), result, iter);
    std::transform(answer.begin(), answer.end(), answer.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    // "sufficient" is a substring of "insufficient"; check the negative first
    const bool insufficient = answer.find("insufficient") != std::string::npos;
    if (!insufficient && answer.find("sufficient") != std::string::npos) break;
  }

  issue_verdict(result, claim);
  return result;
}

}  // namespace pcc
