#include "pcc/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcc/errors.hpp"

namespace pcc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::set<std::string> split_tokens(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.insert(normalize_token(item));
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out;
  in >> out;
  if (in.fail()) throw ConfigError("invalid number for " + key + ": " + value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean for " + key + ": " + value);
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig RunConfig::resolve(const std::map<std::string, std::string>& file_values,
                             const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> merged = file_values;
  for (const auto& [k, v] : overrides) merged[k] = v;

  RunConfig cfg;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = merged.find(key);
    return it == merged.end() ? nullptr : &it->second;
  };
  if (auto* v = get("mode")) cfg.mode = parse_mode(*v);
  if (auto* v = get("seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto* v = get("cache_dir")) cfg.cache_dir = *v;
  if (auto* v = get("templates_dir")) cfg.templates_dir = *v;
  if (auto* v = get("parallelism")) cfg.parallelism = parse_number<int>("parallelism", *v);
  if (auto* v = get("k_rationales")) cfg.k_rationales = parse_number<int>("k_rationales", *v);
  if (auto* v = get("rationale_temperature")) {
    cfg.rationale_temperature = parse_number<double>("rationale_temperature", *v);
  }
  if (auto* v = get("alpha")) cfg.thresholds.alpha = parse_number<double>("alpha", *v);
  if (auto* v = get("beta")) cfg.thresholds.beta = parse_number<double>("beta", *v);
  if (auto* v = get("bins")) cfg.bins = parse_number<int>("bins", *v);
  if (auto* v = get("deep_budget")) cfg.deep_budget = parse_number<int>("deep_budget", *v);
  if (auto* v = get("search_k")) cfg.search_k = parse_number<int>("search_k", *v);
  if (auto* v = get("top_k_logprobs")) {
    cfg.top_k_logprobs = parse_number<int>("top_k_logprobs", *v);
  }
  if (auto* v = get("strict_degenerate")) {
    cfg.strict_degenerate = parse_bool("strict_degenerate", *v);
  }
  if (auto* v = get("lexicon.true_tokens")) cfg.lexicon.true_tokens = split_tokens(*v);
  if (auto* v = get("lexicon.false_tokens")) cfg.lexicon.false_tokens = split_tokens(*v);
  if (auto* v = get("llm.endpoint")) cfg.llm.url = *v;
  if (auto* v = get("llm.model")) cfg.llm.model = *v;
  if (auto* v = get("llm.api_key_env")) cfg.llm.api_key_env = *v;
  if (auto* v = get("nli.endpoint")) cfg.nli.url = *v;
  if (auto* v = get("nli.model")) cfg.nli.model = *v;
  if (auto* v = get("nli.api_key_env")) cfg.nli.api_key_env = *v;
  if (auto* v = get("nli.token_budget")) {
    cfg.nli_token_budget = parse_number<int>("nli.token_budget", *v);
  }
  if (auto* v = get("search.endpoint")) cfg.search.url = *v;
  if (auto* v = get("search.model")) cfg.search.model = *v;
  if (auto* v = get("search.api_key_env")) cfg.search.api_key_env = *v;
  if (cfg.llm.model.empty()) cfg.llm.model = "default-llm";
  if (cfg.nli.model.empty()) cfg.nli.model = "default-nli";
  if (cfg.search.model.empty()) cfg.search.model = "default-search";
  return cfg;
}

void RunConfig::validate() const {
  if (!thresholds.valid()) {
    throw ConfigError("alpha and beta must lie in the open interval (0, 1)");
  }
  if (k_rationales < 1) throw ConfigError("k_rationales must be >= 1");
  if (bins < 1) throw ConfigError("bins must be >= 1");
  if (deep_budget < 1) throw ConfigError("deep_budget must be >= 1");
  if (search_k < 1) throw ConfigError("search_k must be >= 1");
  if (top_k_logprobs < 2) throw ConfigError("top_k_logprobs must be >= 2");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (rationale_temperature < 0.0) throw ConfigError("rationale_temperature must be >= 0");
  if (lexicon.true_tokens.empty() || lexicon.false_tokens.empty()) {
    throw ConfigError("lexicon token sets must be non-empty");
  }
  for (const auto& t : lexicon.true_tokens) {
    if (lexicon.false_tokens.count(t)) {
      throw ConfigError("lexicon sets overlap on token '" + t + "'");
    }
  }
  if (mode == ExecutionMode::Replay) {
    if (cache_dir.empty() || !std::filesystem::exists(cache_dir)) {
      throw ConfigError("replay mode requires an existing cache_dir");
    }
  }
}

nlohmann::json RunConfig::to_json() const {
  auto tokens_json = [](const std::set<std::string>& s) {
    return nlohmann::json(std::vector<std::string>(s.begin(), s.end()));
  };
  return {{"mode", mode_name(mode)},
          {"seed", seed},
          {"cache_dir", cache_dir},
          {"templates_dir", templates_dir},
          {"parallelism", parallelism},
          {"k_rationales", k_rationales},
          {"rationale_temperature", rationale_temperature},
          {"alpha", thresholds.alpha},
          {"beta", thresholds.beta},
          {"bins", bins},
          {"deep_budget", deep_budget},
          {"search_k", search_k},
          {"top_k_logprobs", top_k_logprobs},
          {"strict_degenerate", strict_degenerate},
          {"lexicon",
           {{"true_tokens", tokens_json(lexicon.true_tokens)},
            {"false_tokens", tokens_json(lexicon.false_tokens)}}},
          {"llm", {{"endpoint", llm.url}, {"model", llm.model}, {"api_key_env", llm.api_key_env}}},
          {"nli",
           {{"endpoint", nli.url},
            {"model", nli.model},
            {"api_key_env", nli.api_key_env},
            {"token_budget", nli_token_budget}}},
          {"search",
           {{"endpoint", search.url},
            {"model", search.model},
            {"api_key_env", search.api_key_env}}}};
}

}  // namespace pcc
