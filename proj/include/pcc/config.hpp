#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "pcc/backends.hpp"
#include "pcc/router.hpp"
#include "pcc/signals.hpp"

namespace pcc {

// Flat key/value view of a TOML-like config file: `[section]` headers become
// dotted key prefixes, values are bare or quoted scalars, `#` starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

struct RunConfig {
  ExecutionMode mode = ExecutionMode::Live;
  std::uint64_t seed = 0;
  std::string cache_dir;
  std::string templates_dir = "templates";
  int parallelism = 4;

  VerdictLexicon lexicon = VerdictLexicon::defaults();
  int k_rationales = 3;
  double rationale_temperature = 0.7;
  RoutingThresholds thresholds;
  int bins = 10;
  int deep_budget = 3;
  int search_k = 5;
  int top_k_logprobs = 10;
  bool strict_degenerate = false;

  HttpEndpoint llm;
  HttpEndpoint nli;
  HttpEndpoint search;
  int nli_token_budget = 512;

  // defaults <- file <- overrides (flags win)
  static RunConfig resolve(const std::map<std::string, std::string>& file_values,
                           const std::map<std::string, std::string>& overrides);

  // Throws ConfigError on out-of-range values; replay requires cache_dir.
  void validate() const;

  // Snapshot for the run manifest. Never includes API key values.
  nlohmann::json to_json() const;
};

}  // namespace pcc
