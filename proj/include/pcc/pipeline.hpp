#pragma once

#include <memory>
#include <vector>

#include "pcc/backends.hpp"
#include "pcc/config.hpp"
#include "pcc/datasets.hpp"
#include "pcc/strategies.hpp"

namespace pcc {

// Everything the scoring stage produces for one claim. Routing and the
// targeted strategies reuse the rationales and matrix without re-eliciting.
struct ScoreOutcome {
  std::string claim_id;
  ConfidenceSignals signals;
  TokenDistribution distribution;
  RationaleSet rationales;
  ContradictionMatrix matrix;
  int llm_calls = 0;
  int nli_calls = 0;
  bool degenerate_warning = false;

  nlohmann::json to_json() const;
};

struct BackendSet {
  std::shared_ptr<LlmBackend> llm;
  std::shared_ptr<NliBackend> nli;
  std::shared_ptr<SearchBackend> search;
};

// Wires HTTP clients (when endpoints are configured) behind cache wrappers
// according to the execution mode. Replay needs no live backends at all.
BackendSet build_backends(const RunConfig& config);

class Pipeline {
 public:
  Pipeline(const RunConfig& config, const PromptLibrary& prompts, BackendSet backends);

  ScoreOutcome score(const Claim& claim);
  VerificationResult verify(const Claim& claim);

  const RunConfig& config() const { return config_; }

 private:
  const RunConfig& config_;
  const PromptLibrary& prompts_;
  BackendSet backends_;
};

struct ClaimFailure {
  std::string claim_id;
  std::string message;
};

// Batch drivers with bounded parallelism. Output is ordered by claim id so
// replayed runs serialize identically. Per-claim failures are collected,
// not fatal.
std::vector<ScoreOutcome> score_all(Pipeline& pipeline, const std::vector<Claim>& claims,
                                    int parallelism, std::vector<ClaimFailure>& failures);
std::vector<VerificationResult> verify_all(Pipeline& pipeline, const std::vector<Claim>& claims,
                                           int parallelism, std::vector<ClaimFailure>& failures);

}  // namespace pcc
