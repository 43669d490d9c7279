// pcc — confidence-guided fact-checking CLI.
//
// Subcommands: score, verify, eval, calibrate, dataset-adapt.
// Exit codes: 0 success, 1 partial per-claim failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcc/cache.hpp"
#include "pcc/config.hpp"
#include "pcc/datasets.hpp"
#include "pcc/errors.hpp"
#include "pcc/eval.hpp"
#include "pcc/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::string output = "-";
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path == "-" || path.empty()) return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw pcc::ConfigError("cannot write output file: " + path);
  return file;
}

pcc::RunConfig load_config(const GlobalOpts& opts) {
  std::map<std::string, std::string> file_values;
  if (!opts.config_path.empty()) file_values = pcc::parse_config_file(opts.config_path);
  pcc::RunConfig cfg = pcc::RunConfig::resolve(file_values, opts.overrides);
  cfg.validate();
  return cfg;
}

std::string hash_templates(const std::string& dir) {
  std::ostringstream all;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    all << f.filename().string() << "\0";
    all << in.rdbuf() << "\0";
  }
  return pcc::sha256_hex(all.str());
}

void write_manifest(const std::string& output_path, const pcc::RunConfig& cfg) {
  if (output_path == "-" || output_path.empty()) return;
  json manifest{{"config", cfg.to_json()},
                {"templates_sha256", hash_templates(cfg.templates_dir)}};
  std::ofstream out(output_path + ".manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
}

void write_error_report(const std::string& output_path,
                        const std::vector<pcc::LoadError>& load_errors,
                        const std::vector<pcc::ClaimFailure>& claim_failures) {
  if (output_path == "-" || output_path.empty()) return;
  if (load_errors.empty() && claim_failures.empty()) return;
  json report{{"load_errors", json::array()}, {"claim_failures", json::array()}};
  for (const auto& e : load_errors) {
    report["load_errors"].push_back({{"line", e.line}, {"message", e.message}});
  }
  for (const auto& f : claim_failures) {
    report["claim_failures"].push_back({{"claim_id", f.claim_id}, {"message", f.message}});
  }
  std::ofstream out(output_path + ".errors.json", std::ios::binary | std::ios::trunc);
  out << report.dump(2) << "\n";
}

std::vector<pcc::Claim> load_dataset(const std::string& path,
                                     std::vector<pcc::LoadError>& errors) {
  pcc::DatasetManifest manifest;
  manifest.name = fs::path(path).stem().string();
  manifest.path = path;
  auto result = pcc::load_claims(manifest);
  errors = std::move(result.errors);
  return std::move(result.claims);
}

json report_to_json(const pcc::CalibrationReport& report) {
  json bins = json::array();
  for (const auto& b : report.bins) {
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"mean_confidence", b.mean_confidence},
                    {"accuracy", b.accuracy}});
  }
  json j{{"ece", report.ece},
         {"auroc", report.auroc ? json(*report.auroc) : json(nullptr)},
         {"macro_f1", report.macro_f1},
         {"f1_true", report.f1_true},
         {"f1_false", report.f1_false},
         {"n", report.n},
         {"bins", bins}};
  return j;
}

// --------------------------------------------------------------------------

int cmd_score(const GlobalOpts& opts, const std::string& dataset_path) {
  pcc::RunConfig cfg = load_config(opts);
  pcc::PromptLibrary prompts = pcc::PromptLibrary::load(cfg.templates_dir);
  pcc::BackendSet backends = pcc::build_backends(cfg);
  pcc::Pipeline pipeline(cfg, prompts, backends);

  std::vector<pcc::LoadError> load_errors;
  std::vector<pcc::Claim> claims = load_dataset(dataset_path, load_errors);
  std::map<std::string, std::optional<bool>> gold;
  for (const auto& c : claims) gold[c.id] = c.gold;

  std::vector<pcc::ClaimFailure> failures;
  auto outcomes = pcc::score_all(pipeline, claims, cfg.parallelism, failures);

  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  for (const auto& o : outcomes) {
    json j = o.to_json();
    j["predicted"] = o.signals.class_prob_true > o.signals.class_prob_false ? "True" : "False";
    const auto& g = gold[o.claim_id];
    j["gold"] = g ? json(*g ? "True" : "False") : json(nullptr);
    out << j.dump() << "\n";
  }
  write_manifest(opts.output, cfg);
  write_error_report(opts.output, load_errors, failures);
  for (const auto& f : failures) {
    std::cerr << "claim " << f.claim_id << " failed: " << f.message << "\n";
  }
  return failures.empty() && load_errors.empty() ? 0 : 1;
}

int cmd_verify(const GlobalOpts& opts, const std::string& dataset_path,
               const std::string& summary_path) {
  pcc::RunConfig cfg = load_config(opts);
  pcc::PromptLibrary prompts = pcc::PromptLibrary::load(cfg.templates_dir);
  pcc::BackendSet backends = pcc::build_backends(cfg);
  pcc::Pipeline pipeline(cfg, prompts, backends);

  std::vector<pcc::LoadError> load_errors;
  std::vector<pcc::Claim> claims = load_dataset(dataset_path, load_errors);
  std::map<std::string, std::optional<bool>> gold;
  for (const auto& c : claims) gold[c.id] = c.gold;

  std::vector<pcc::ClaimFailure> failures;
  auto results = pcc::verify_all(pipeline, claims, cfg.parallelism, failures);

  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  std::map<std::string, int> histogram;
  int llm_calls = 0, search_calls = 0, nli_calls = 0;
  std::vector<pcc::ScoredPrediction> preds;
  for (const auto& r : results) {
    json j = r.to_json();
    const auto& g = gold[r.claim_id];
    j["gold"] = g ? json(*g ? "True" : "False") : json(nullptr);
    out << j.dump() << "\n";
    ++histogram[pcc::strategy_name(r.strategy)];
    llm_calls += r.llm_calls;
    search_calls += r.search_calls;
    nli_calls += r.nli_calls;
    if (g && r.verdict) {
      preds.push_back({r.claim_id, r.signals.pcc, *r.verdict, *g});
    }
  }

  json summary{{"claims", results.size()},
               {"strategy_histogram", histogram},
               {"cost", {{"llm_calls", llm_calls},
                         {"search_calls", search_calls},
                         {"nli_calls", nli_calls}}}};
  if (!preds.empty()) summary["metrics"] = report_to_json(pcc::calibration_report(preds, cfg.bins));
  if (!summary_path.empty()) {
    std::ofstream s(summary_path, std::ios::binary | std::ios::trunc);
    s << summary.dump(2) << "\n";
  } else {
    std::cerr << summary.dump(2) << "\n";
  }
  write_manifest(opts.output, cfg);
  write_error_report(opts.output, load_errors, failures);
  for (const auto& f : failures) {
    std::cerr << "claim " << f.claim_id << " failed: " << f.message << "\n";
  }
  return failures.empty() && load_errors.empty() ? 0 : 1;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pcc::FileUnreadable("cannot open: " + path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (!j.is_discarded()) out.push_back(std::move(j));
  }
  return out;
}

std::optional<bool> parse_label_field(const json& j, const std::string& field) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  return pcc::normalize_label(j[field].is_string() ? j[field].get<std::string>()
                                                   : j[field].dump());
}

int cmd_eval(const GlobalOpts& opts, const std::string& scored_path, const std::string& column,
             int bins_override) {
  pcc::RunConfig cfg = load_config(opts);
  const int bins = bins_override > 0 ? bins_override : cfg.bins;
  std::vector<pcc::ScoredPrediction> preds;
  for (const auto& j : read_jsonl(scored_path)) {
    if (!j.contains(column) || !j[column].is_number()) {
      throw pcc::MissingColumn("record missing numeric column '" + column + "'");
    }
    auto gold = parse_label_field(j, "gold");
    auto predicted = parse_label_field(j, "predicted");
    if (!predicted && j.contains("verdict")) predicted = parse_label_field(j, "verdict");
    if (!gold || !predicted) continue;  // unlabeled or unverified rows are skipped
    pcc::ScoredPrediction p;
    p.claim_id = j.value("claim_id", j.value("id", ""));
    p.confidence = j[column].get<double>();
    p.predicted = *predicted;
    p.gold = *gold;
    preds.push_back(std::move(p));
  }
  if (preds.empty()) throw pcc::EmptyInput("no labeled predictions in " + scored_path);
  pcc::CalibrationReport report = pcc::calibration_report(preds, bins);
  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  out << report_to_json(report).dump(2) << "\n";
  return 0;
}

int cmd_calibrate(const GlobalOpts& opts, const std::string& scored_path, double grid_step,
                  const std::string& surface_path) {
  load_config(opts);  // validates any provided config
  if (grid_step <= 0.0 || grid_step >= 1.0) {
    throw pcc::ConfigError("--grid-step must lie strictly inside (0, 1)");
  }
  struct Row {
    double tau, gamma;
    bool gold;
    std::map<std::string, std::optional<bool>> verdicts;
  };
  std::vector<Row> rows;
  for (const auto& j : read_jsonl(scored_path)) {
    auto gold = parse_label_field(j, "gold");
    if (!gold || !j.contains("certainty") || !j.contains("consistency")) continue;
    Row row;
    row.tau = j["certainty"].get<double>();
    row.gamma = j["consistency"].get<double>();
    row.gold = *gold;
    if (j.contains("verdicts") && j["verdicts"].is_object()) {
      for (const auto& [name, value] : j["verdicts"].items()) {
        row.verdicts[name] = value.is_string() ? pcc::normalize_label(value.get<std::string>())
                                               : std::nullopt;
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw pcc::EmptyInput("no calibratable rows in " + scored_path);

  std::ostringstream surface;
  surface << "alpha,beta,macro_f1\n";
  double best_f1 = -1.0;
  pcc::RoutingThresholds best;
  for (double alpha = grid_step; alpha < 1.0 - 1e-9; alpha += grid_step) {
    for (double beta = grid_step; beta < 1.0 - 1e-9; beta += grid_step) {
      std::vector<pcc::ScoredPrediction> preds;
      for (const auto& row : rows) {
        pcc::ConfidenceSignals s;
        s.certainty = row.tau;
        s.consistency = row.gamma;
        const char* name = pcc::strategy_name(pcc::route(s, {alpha, beta}));
        auto it = row.verdicts.find(name);
        // a missing or unverified outcome counts as a wrong prediction
        const bool predicted =
            (it != row.verdicts.end() && it->second) ? *it->second : !row.gold;
        preds.push_back({"", 0.0, predicted, row.gold});
      }
      const double macro = std::get<2>(pcc::f1_scores(preds));
      surface << alpha << "," << beta << "," << macro << "\n";
      // ties resolve toward larger alpha + beta (cheaper routing)
      if (macro > best_f1 + 1e-12 ||
          (macro > best_f1 - 1e-12 && alpha + beta > best.alpha + best.beta + 1e-12)) {
        best_f1 = macro;
        best = {alpha, beta};
      }
    }
  }
  if (!surface_path.empty()) {
    std::ofstream s(surface_path, std::ios::binary | std::ios::trunc);
    s << surface.str();
  }
  std::ofstream file;
  std::ostream& out = open_output(opts.output, file);
  out << json{{"alpha", best.alpha}, {"beta", best.beta}, {"macro_f1", best_f1}}.dump() << "\n";
  return 0;
}

int cmd_dataset_adapt(const GlobalOpts& opts, const std::string& format,
                      const std::string& input_path, int hops, long sample_n,
                      std::uint64_t seed) {
  std::vector<pcc::Claim> claims;
  if (format == "scifact") {
    std::vector<pcc::EvidenceRecord> records;
    for (const auto& j : read_jsonl(input_path)) {
      pcc::EvidenceRecord rec;
      rec.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>()
                                                       : j["id"].dump())
                                : "";
      rec.claim = j.value("claim", "");
      if (j.contains("evidence_labels") && j["evidence_labels"].is_array()) {
        for (const auto& l : j["evidence_labels"]) rec.evidence_labels.push_back(l.get<std::string>());
      } else if (j.contains("evidence") && j["evidence"].is_object()) {
        for (const auto& [doc, anns] : j["evidence"].items()) {
          for (const auto& ann : anns) {
            if (ann.contains("label")) rec.evidence_labels.push_back(ann["label"].get<std::string>());
          }
        }
      }
      records.push_back(std::move(rec));
    }
    claims = pcc::binarize_scifact(records);
  } else if (format == "hover") {
    for (const auto& j : read_jsonl(input_path)) {
      pcc::Claim c;
      c.id = j.contains("uid") ? j["uid"].get<std::string>()
                               : (j.contains("id") ? j["id"].dump() : "");
      c.text = j.value("claim", "");
      c.source = "hover";
      if (j.contains("label")) c.gold = pcc::normalize_label(j["label"].get<std::string>());
      if (j.contains("num_hops") && j["num_hops"].is_number()) c.hops = j["num_hops"].get<int>();
      if (c.text.empty()) continue;
      if (hops > 0 && (!c.hops || *c.hops != hops)) continue;
      claims.push_back(std::move(c));
    }
  } else {
    throw pcc::ConfigError("unknown dataset format: " + format);
  }
  if (sample_n >= 0) {
    claims = pcc::sample_subset(std::move(claims), static_cast<std::size_t>(sample_n), seed);
  }
  if (opts.output == "-" || opts.output.empty()) {
    for (const auto& c : claims) std::cout << c.to_json().dump() << "\n";
  } else {
    pcc::write_claims_jsonl(claims, opts.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-guided fact-checking engine"};
  app.require_subcommand(1);

  GlobalOpts opts;
  std::string flag_mode, flag_cache_dir, flag_templates;
  long long flag_seed = -1;
  int flag_parallelism = -1;
  app.add_option("--config", opts.config_path, "Config file (TOML-like key = value)");
  app.add_option("--mode", flag_mode, "Execution mode: live | record | replay");
  app.add_option("--cache-dir", flag_cache_dir, "Response cache directory");
  app.add_option("--seed", flag_seed, "Seed for any sampling");
  app.add_option("--output", opts.output, "Output path ('-' for stdout)");
  app.add_option("--parallelism", flag_parallelism, "Max claims in flight");
  app.add_option("--templates", flag_templates, "Prompt template directory");

  std::string dataset_path, scored_path, column = "pcc", summary_path, surface_path;
  std::string adapt_format, adapt_input;
  int bins = -1, hops = 0;
  long sample_n = -1;
  double alpha = -1.0, beta = -1.0, grid_step = 0.05;
  int k_rationales = -1, deep_budget = -1, search_k = -1;

  auto* score = app.add_subcommand("score", "Compute confidence signals per claim");
  score->add_option("dataset", dataset_path, "Claims JSONL file")->required();
  score->add_option("--k-rationales", k_rationales, "Rationales per side");

  auto* verify = app.add_subcommand("verify", "Score, route, and verify each claim");
  verify->add_option("dataset", dataset_path, "Claims JSONL file")->required();
  verify->add_option("--alpha", alpha, "Certainty threshold in (0,1)");
  verify->add_option("--beta", beta, "Consistency threshold in (0,1)");
  verify->add_option("--k-rationales", k_rationales, "Rationales per side");
  verify->add_option("--deep-budget", deep_budget, "Deep-search iteration budget");
  verify->add_option("--search-k", search_k, "Snippets per search");
  verify->add_option("--bins", bins, "Calibration bins for the summary");
  verify->add_option("--summary", summary_path, "Summary report path");

  auto* eval = app.add_subcommand("eval", "Calibration report over a scored file");
  eval->add_option("scored", scored_path, "Scored JSONL file")->required();
  eval->add_option("--column", column, "Confidence column: verbal|certainty|consistency|pcc");
  eval->add_option("--bins", bins, "Number of equal-width bins");

  auto* calibrate = app.add_subcommand("calibrate", "Grid-search routing thresholds");
  calibrate->add_option("scored", scored_path, "Scored JSONL with per-strategy verdicts")
      ->required();
  calibrate->add_option("--grid-step", grid_step, "Threshold grid step in (0,1)");
  calibrate->add_option("--surface", surface_path, "CSV path for the score surface");

  auto* adapt = app.add_subcommand("dataset-adapt", "Convert upstream dataset formats");
  adapt->add_option("--format", adapt_format, "scifact | hover")->required();
  adapt->add_option("input", adapt_input, "Upstream JSONL file")->required();
  adapt->add_option("--hops", hops, "Keep only claims with this hop count");
  adapt->add_option("--sample-n", sample_n, "Deterministic subset size");

  // let global flags (--output, --mode, ...) appear after the subcommand too
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (!flag_mode.empty()) opts.overrides["mode"] = flag_mode;
  if (!flag_cache_dir.empty()) opts.overrides["cache_dir"] = flag_cache_dir;
  if (flag_seed >= 0) opts.overrides["seed"] = std::to_string(flag_seed);
  if (flag_parallelism > 0) opts.overrides["parallelism"] = std::to_string(flag_parallelism);
  if (!flag_templates.empty()) opts.overrides["templates_dir"] = flag_templates;
  if (alpha >= 0.0) opts.overrides["alpha"] = std::to_string(alpha);
  if (beta >= 0.0) opts.overrides["beta"] = std::to_string(beta);
  if (k_rationales > 0) opts.overrides["k_rationales"] = std::to_string(k_rationales);
  if (deep_budget > 0) opts.overrides["deep_budget"] = std::to_string(deep_budget);
  if (search_k > 0) opts.overrides["search_k"] = std::to_string(search_k);
  if (bins > 0) opts.overrides["bins"] = std::to_string(bins);

  try {
    if (score->parsed()) return cmd_score(opts, dataset_path);
    if (verify->parsed()) return cmd_verify(opts, dataset_path, summary_path);
    if (eval->parsed()) return cmd_eval(opts, scored_path, column, bins);
    if (calibrate->parsed()) return cmd_calibrate(opts, scored_path, grid_step, surface_path);
    if (adapt->parsed()) {
      const std::uint64_t seed = flag_seed >= 0 ? static_cast<std::uint64_t>(flag_seed) : 0;
      return cmd_dataset_adapt(opts, adapt_format, adapt_input, hops, sample_n, seed);
    }
  } catch (const pcc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const pcc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
