#include "pcc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "pcc/errors.hpp"

namespace pcc {

nlohmann::json ScoreOutcome::to_json() const {
  return {{"claim_id", claim_id},
          {"certainty", signals.certainty},
          {"consistency", signals.consistency},
          {"pcc", signals.pcc},
          {"p_true", signals.class_prob_true},
          {"p_false", signals.class_prob_false},
          {"margin", signals.margin},
          {"llm_calls", llm_calls},
          {"nli_calls", nli_calls},
          {"degenerate_warning", degenerate_warning}};
}

BackendSet build_backends(const RunConfig& config) {
  BackendSet set;
  std::shared_ptr<LlmBackend> llm_inner;
  std::shared_ptr<NliBackend> nli_inner;
  std::shared_ptr<SearchBackend> search_inner;
  if (config.mode != ExecutionMode::Replay) {
    if (!config.llm.url.empty()) {
      llm_inner = std::make_shared<HttpLlmBackend>(config.llm, RetryPolicy{}, config.parallelism);
    }
    if (!config.nli.url.empty()) {
      nli_inner = std::make_shared<HttpNliBackend>(config.nli, RetryPolicy{}, config.parallelism,
                                                   config.nli_token_budget);
    }
    if (!config.search.url.empty()) {
      search_inner =
          std::make_shared<HttpSearchBackend>(config.search, RetryPolicy{}, config.parallelism);
    }
  }
  if (config.mode == ExecutionMode::Record && config.cache_dir.empty()) {
    throw ConfigError("record mode requires cache_dir");
  }
  if (!config.cache_dir.empty()) {
    auto cache = std::make_shared<ResponseCache>(config.cache_dir);
    set.llm = std::make_shared<CachedLlmBackend>(llm_inner, cache, config.mode, config.llm.model);
    set.nli = std::make_shared<CachedNliBackend>(nli_inner, cache, config.mode, config.nli.model);
    set.search = std::make_shared<CachedSearchBackend>(search_inner, cache, config.mode,
                                                       config.search.model);
  } else {
    set.llm = llm_inner;
    set.nli = nli_inner;
    set.search = search_inner;
  }
  return set;
}

Pipeline::Pipeline(const RunConfig& config, const PromptLibrary& prompts, BackendSet backends)
    : config_(config), prompts_(prompts), backends_(std::move(backends)) {}

ScoreOutcome Pipeline::score(const Claim& claim) {
  if (!backends_.llm || !backends_.nli) {
    throw BackendUnavailable("scoring needs llm and nli backends");
  }
  ScoreOutcome out;
  out.claim_id = claim.id;

  out.distribution = llm_verdict_distribution(*backends_.llm, prompts_, claim.text,
                                              config_.top_k_logprobs);
  out.llm_calls += 1;
  const auto [p_true, p_false] =
      aggregate_class_probabilities(out.distribution, config_.lexicon);
  out.signals.class_prob_true = p_true;
  out.signals.class_prob_false = p_false;
  out.signals.margin = std::log(p_true + 1e-9) - std::log(p_false + 1e-9);
  out.signals.certainty = internal_certainty(out.distribution, config_.lexicon,
                                             config_.strict_degenerate, &out.degenerate_warning);

  out.rationales.supporting =
      llm_rationales(*backends_.llm, prompts_, claim.text, true, config_.k_rationales,
                     config_.rationale_temperature);
  out.rationales.refuting =
      llm_rationales(*backends_.llm, prompts_, claim.text, false, config_.k_rationales,
                     config_.rationale_temperature);
  out.llm_calls += 2 * config_.k_rationales;

  out.matrix = contradiction_matrix(*backends_.nli, out.rationales, &out.nli_calls);
  out.signals.consistency = reasoning_consistency(out.matrix);
  out.signals.pcc = combine_pcc(out.signals.certainty, out.signals.consistency);
  return out;
}

VerificationResult Pipeline::verify(const Claim& claim) {
  ScoreOutcome scored = score(claim);
  const Strategy strategy = route(scored.signals, config_.thresholds);

  if (!backends_.search && strategy != Strategy::DirectAnswer) {
    throw BackendUnavailable("strategy " + std::string(strategy_name(strategy)) +
                             " needs a search backend");
  }
  StrategyExecutor executor(*backends_.llm, backends_.search.get(), prompts_, config_.search_k,
                            config_.deep_budget);

  VerificationResult result;
  switch (strategy) {
    case Strategy::DirectAnswer:
      result = executor.direct_answer(claim.id, scored.signals);
      break;
    case Strategy::TargetedContradiction:
      result = executor.targeted_contradiction(claim.id, claim.text, scored.signals,
                                               scored.matrix, scored.rationales);
      break;
    case Strategy::TargetedReflection:
      result = executor.targeted_reflection(claim.id, claim.text, scored.signals);
      break;
    case Strategy::DeepSearch:
      result = executor.deep_search(claim.id, claim.text, scored.signals, config_.deep_budget);
      break;
  }
  result.llm_calls += scored.llm_calls;
  result.nli_calls += scored.nli_calls;
  return result;
}

namespace {

template <typename Result, typename Fn>
std::vector<Result> run_all(const std::vector<Claim>& claims, int parallelism, Fn fn,
                            std::vector<ClaimFailure>& failures) {
  std::vector<std::optional<Result>> slots(claims.size());
  std::mutex failures_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= claims.size()) return;
      try {
        slots[i] = fn(claims[i]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mu);
        failures.push_back({claims[i].id, e.what()});
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(parallelism, claims.size()));
  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::vector<Result> out;
  out.reserve(claims.size());
  for (auto& slot : slots) {
    if (slot) out.push_back(std::move(*slot));
  }
  std::sort(out.begin(), out.end(),
            [](const Result& a, const Result& b) { return a.claim_id < b.claim_id; });
  std::sort(failures.begin(), failures.end(),
            [](const ClaimFailure& a, const ClaimFailure& b) { return a.claim_id < b.claim_id; });
  return out;
}

}  // namespace

std::vector<ScoreOutcome> score_all(Pipeline& pipeline, const std::vector<Claim>& claims,
                                    int parallelism, std::vector<ClaimFailure>& failures) {
  return run_all<ScoreOutcome>(
      claims, parallelism, [&](const Claim& c) { return pipeline.score(c); }, failures);
}

std::vector<VerificationResult> verify_all(Pipeline& pipeline, const std::vector<Claim>& claims,
                                           int parallelism, std::vector<ClaimFailure>& failures) {
  return run_all<VerificationResult>(
      claims, parallelism, [&](const Claim& c) { return pipeline.verify(c); }, failures);
}

}  // namespace pcc
