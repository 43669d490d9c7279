// Acceptance gate: one pass/fail line per criterion, non-zero exit on any
// failure. Criterion 9 is optional and reports SKIP when no recorded desk
// slice is available (point PCC_DESK_SCORED at a scored JSONL to enable it).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "pcc/backends.hpp"
#include "pcc/datasets.hpp"
#include "pcc/errors.hpp"
#include "pcc/eval.hpp"
#include "pcc/pipeline.hpp"
#include "pcc/prompts.hpp"
#include "pcc/router.hpp"
#include "pcc/signals.hpp"
#include "test_support.hpp"

using namespace pcc;
using namespace pcc::testing;

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (first_failure_.empty()) first_failure_ = detail;
    }
  }

  void expect_near(double got, double want, double tol, const std::string& what) {
    expect(std::fabs(got - want) <= tol,
           what + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  }

  void runtime_budget(double seconds) {
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start_).count();
    expect(elapsed < seconds, "runtime " + std::to_string(elapsed) + "s exceeds budget " +
                                  std::to_string(seconds) + "s");
  }

  void finish() {
    if (ok_) {
      std::cout << "PASS criterion " << number_ << ": " << title_ << "\n";
    } else {
      std::cout << "FAIL criterion " << number_ << ": " << title_ << " — " << first_failure_
                << "\n";
      ++g_failures;
    }
  }

  void skip(const std::string& reason) {
    std::cout << "SKIP criterion " << number_ << ": " << title_ << " — " << reason << "\n";
  }

 private:
  int number_;
  std::string title_;
  bool ok_ = true;
  std::string first_failure_;
  std::chrono::steady_clock::time_point start_;
};

std::string template_dir() {
  return PCC_TEMPLATE_DIR;
}

// ---------------------------------------------------------------------------

void criterion_1_signals() {
  Criterion c(1, "signal correctness vs direct transcription");
  const VerdictLexicon lex = VerdictLexicon::defaults();
  Rng rng(20260823);
  for (int i = 0; i < 1000; ++i) {
    const TokenDistribution dist = random_distribution(rng);
    const double got = internal_certainty(dist, lex);
    const double want = oracle_certainty(dist, lex);
    c.expect(got == want, "certainty mismatch on case " + std::to_string(i));
  }
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + rng.uniform_int(6);
    std::vector<std::vector<double>> fwd(k, std::vector<double>(k));
    std::vector<std::vector<double>> bwd(k, std::vector<double>(k));
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        fwd[i][j] = rng.uniform();
        bwd[i][j] = rng.uniform();
        total += (fwd[i][j] + bwd[i][j]) / 2.0;
      }
    }
    const auto m = ContradictionMatrix::from_raw(fwd, bwd);
    c.expect_near(reasoning_consistency(m), 1.0 - total / static_cast<double>(k * k), 1e-12,
                  "consistency case " + std::to_string(t));
  }
  c.runtime_budget(5.0);
  c.finish();
}

void criterion_2_combiner() {
  Criterion c(2, "harmonic combiner property suite");
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double h = combine_pcc(a, b);
    c.expect(std::fabs(h - combine_pcc(b, a)) <= 1e-12, "symmetry");
    c.expect(std::fabs(combine_pcc(a, a) - a) <= 1e-12, "idempotence");
    c.expect(combine_pcc(0.0, b) == 0.0 && combine_pcc(a, 0.0) == 0.0, "zero annihilation");
    c.expect(h >= 0.0 && h <= std::max(a, b) + 1e-12, "max bounding");
    c.expect(h <= 2.0 * std::min(a, b) + 1e-12, "min bounding (harmonic <= 2 min)");
    const double a2 = std::min(1.0, a + rng.uniform() * (1.0 - a));
    c.expect(combine_pcc(a2, b) >= h - 1e-12, "monotonicity");
  }
  c.runtime_budget(5.0);
  c.finish();
}

void criterion_3_metrics() {
  Criterion c(3, "metric oracles (ECE, AUROC, ROC trapezoid, F1)");
  Rng rng(31);
  const int bin_choices[] = {1, 5, 10, 15};
  for (int t = 0; t < 200; ++t) {
    std::vector<ScoredPrediction> preds;
    const int n = 1 + rng.uniform_int(500);
    for (int i = 0; i < n; ++i) {
      preds.push_back({"c" + std::to_string(i), rng.uniform_int(21) / 20.0,
                       rng.coin(), rng.coin()});
    }
    const int m = bin_choices[rng.uniform_int(4)];
    c.expect_near(expected_calibration_error(preds, m).first, oracle_ece(preds, m), 1e-9,
                  "ECE case " + std::to_string(t));
    c.expect(f1_scores(preds) == oracle_f1(preds), "F1 case " + std::to_string(t));
  }
  int done = 0;
  while (done < 200) {
    std::vector<ScoredPrediction> preds;
    const int n = 2 + rng.uniform_int(199);
    for (int i = 0; i < n; ++i) {
      preds.push_back({"c" + std::to_string(i), rng.uniform_int(21) / 20.0,
                       rng.coin(), rng.coin()});
    }
    bool any_pos = false, any_neg = false;
    for (const auto& p : preds) (p.correct() ? any_pos : any_neg) = true;
    if (!any_pos || !any_neg) continue;
    ++done;
    const double a = auroc(preds);
    c.expect_near(a, oracle_auroc(preds), 1e-9, "AUROC case " + std::to_string(done));
    const auto pts = roc_points(preds);
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
    }
    c.expect_near(a, area, 1e-9, "ROC trapezoid case " + std::to_string(done));
  }
  c.runtime_budget(30.0);
  c.finish();
}

void criterion_4_routing() {
  Criterion c(4, "routing totality on a 101x101 grid, boundaries inclusive");
  const double pairs[9][2] = {{0.1, 0.1}, {0.1, 0.5}, {0.1, 0.9}, {0.5, 0.1}, {0.5, 0.5},
                              {0.5, 0.9}, {0.9, 0.1}, {0.9, 0.5}, {0.9, 0.9}};
  for (const auto& p : pairs) {
    const RoutingThresholds t{p[0], p[1]};
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        ConfidenceSignals s;
        s.certainty = i / 100.0;
        s.consistency = j / 100.0;
        const bool hi_tau = s.certainty >= t.alpha;
        const bool hi_gamma = s.consistency >= t.beta;
        const Strategy want = hi_tau ? (hi_gamma ? Strategy::DirectAnswer
                                                 : Strategy::TargetedContradiction)
                                     : (hi_gamma ? Strategy::TargetedReflection
                                                 : Strategy::DeepSearch);
        c.expect(route(s, t) == want, "grid point mismatch");
      }
    }
    // exact boundary points land in the inclusive quadrants
    ConfidenceSignals s;
    s.certainty = t.alpha;
    s.consistency = t.beta;
    c.expect(route(s, t) == Strategy::DirectAnswer, "tau=alpha, gamma=beta boundary");
    s.consistency = t.beta - 1e-9;
    c.expect(route(s, t) == Strategy::TargetedContradiction, "tau=alpha boundary");
    s.certainty = t.alpha - 1e-9;
    s.consistency = t.beta;
    c.expect(route(s, t) == Strategy::TargetedReflection, "gamma=beta boundary");
  }
  c.runtime_budget(5.0);
  c.finish();
}

void criterion_5_quadrants(std::vector<std::string>& seen_prompts_out,
                           std::vector<Claim>& claims_out) {
  Criterion c(5, "four-quadrant mock pipeline end to end");
  const PromptLibrary prompts = PromptLibrary::load(template_dir());
  QuadrantFixture fx = make_quadrant_fixture();
  Pipeline pipeline(fx.config, prompts, BackendSet{fx.llm, fx.nli, fx.search});

  std::vector<ClaimFailure> failures;
  const auto results = verify_all(pipeline, fx.claims, 2, failures);
  c.expect(failures.empty(), "per-claim failures in fixture run");
  c.expect(results.size() == 4, "expected 4 results");

  std::map<Strategy, int> histogram;
  for (const auto& r : results) ++histogram[r.strategy];
  c.expect(histogram[Strategy::DirectAnswer] == 1, "DirectAnswer count");
  c.expect(histogram[Strategy::TargetedContradiction] == 1, "TargetedContradiction count");
  c.expect(histogram[Strategy::TargetedReflection] == 1, "TargetedReflection count");
  c.expect(histogram[Strategy::DeepSearch] == 1, "DeepSearch count");

  for (const auto& r : results) {
    if (r.strategy == Strategy::DirectAnswer) {
      c.expect(r.search_calls == 0, "direct answer must not search");
    }
    if (r.strategy == Strategy::DeepSearch) {
      c.expect(r.iterations == 3, "deep search should stop at the scripted sufficiency probe");
      c.expect(r.iterations <= fx.config.deep_budget, "deep search exceeded budget");
    }
    c.expect(r.verdict.has_value(), "unverified claim " + r.claim_id);
  }

  // budget respect and early exit, probed directly on the executor
  {
    QuadrantFixture fresh = make_quadrant_fixture();
    StrategyExecutor exec(*fresh.llm, fresh.search.get(), prompts, fresh.config.search_k, 3);
    ConfidenceSignals low;
    const auto deep = exec.deep_search("q4_deep", fresh.claims[3].text, low, 10);
    c.expect(deep.iterations == 3, "early exit under a larger budget");
  }

  seen_prompts_out = fx.llm->seen_prompts();
  claims_out = fx.claims;
  c.runtime_budget(10.0);
  c.finish();
}

void criterion_6_replay() {
  Criterion c(6, "record/replay determinism (byte-identical JSONL)");
  const PromptLibrary prompts = PromptLibrary::load(template_dir());
  const fs::path dir = fs::temp_directory_path() / "pcc_acceptance_replay";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cache = std::make_shared<ResponseCache>(dir.string());

  auto run = [&](bool record) {
    QuadrantFixture fx = make_quadrant_fixture();
    BackendSet set;
    const ExecutionMode mode = record ? ExecutionMode::Record : ExecutionMode::Replay;
    set.llm = std::make_shared<CachedLlmBackend>(record ? fx.llm : nullptr, cache, mode,
                                                 "mock-llm");
    set.nli = std::make_shared<CachedNliBackend>(record ? fx.nli : nullptr, cache, mode,
                                                 "mock-nli");
    set.search = std::make_shared<CachedSearchBackend>(record ? fx.search : nullptr, cache, mode,
                                                       "mock-search");
    Pipeline pipeline(fx.config, prompts, set);
    std::vector<ClaimFailure> failures;
    const auto results = verify_all(pipeline, fx.claims, 3, failures);
    std::ostringstream out;
    for (const auto& r : results) out << r.to_json().dump() << "\n";
    return failures.empty() ? out.str() : std::string("<failed>");
  };

  const std::string recorded = run(true);
  const std::string replay_a = run(false);
  const std::string replay_b = run(false);
  c.expect(recorded != "<failed>", "recording run failed");
  c.expect(replay_a == recorded, "replay differs from recording");
  c.expect(replay_a == replay_b, "two replays differ");
  fs::remove_all(dir);
  c.runtime_budget(10.0);
  c.finish();
}

void criterion_7_prompts(const std::vector<std::string>& seen_prompts,
                         const std::vector<Claim>& claims) {
  Criterion c(7, "prompt fidelity: golden templates and claim containment");
  const char* names[] = {"verbal_confidence", "verdict_token",  "rationale_true",
                         "rationale_false",   "targeted_query", "reflection_query",
                         "deep_verdict"};
  for (const char* name : names) {
    auto slurp = [](const fs::path& p) -> std::string {
      std::ifstream in(p, std::ios::binary);
      if (!in) return "<unreadable>";
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    const std::string shipped = slurp(fs::path(template_dir()) / (std::string(name) + ".txt"));
    const std::string golden = slurp(fs::path(PCC_GOLDEN_DIR) / (std::string(name) + ".txt"));
    c.expect(shipped != "<unreadable>" && shipped == golden,
             std::string("template drift: ") + name);
  }

  c.expect(!seen_prompts.empty(), "criterion 5 produced no prompts");
  bool saw_pair = false;
  for (const auto& prompt : seen_prompts) {
    bool grounded = false;
    for (const auto& claim : claims) {
      if (prompt.find(claim.text) != std::string::npos) grounded = true;
    }
    if (prompt.find("Premise: \"SUP2") != std::string::npos &&
        prompt.find("Hypothesis: \"REF2") != std::string::npos) {
      saw_pair = true;
      grounded = true;  // pair prompt is grounded in the selected rationales instead
    }
    c.expect(grounded, "prompt not grounded in any fixture claim:\n" + prompt.substr(0, 120));
  }
  c.expect(saw_pair, "no prompt carried the selected premise/hypothesis pair");
  c.finish();
}

void criterion_8_datasets() {
  Criterion c(8, "dataset binarization rules and deterministic sampling");
  const auto claims = binarize_scifact({
      {"s1", "All support.", {"SUPPORT", "SUPPORT"}},
      {"s2", "Mixed.", {"SUPPORT", "REFUTE"}},
      {"s3", "NEI only.", {"NOT_ENOUGH_INFO"}},
      {"s4", "All refute.", {"REFUTE"}},
  });
  c.expect(claims.size() == 2, "expected exactly the unanimous records");
  c.expect(claims.size() == 2 && claims[0].id == "s1" && claims[0].gold == true,
           "all-Support must become True");
  c.expect(claims.size() == 2 && claims[1].id == "s4" && claims[1].gold == false,
           "all-Refute must become False");

  std::vector<Claim> pool;
  for (int i = 0; i < 50; ++i) {
    Claim cl;
    cl.id = "p" + std::to_string(100 + i);
    cl.text = "claim";
    pool.push_back(cl);
  }
  const auto a = sample_subset(pool, 12, 7);
  const auto b = sample_subset(pool, 12, 7);
  c.expect(a.size() == 12, "sample size");
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].id == b[i].id;
  c.expect(same, "fixed-seed sampling must be reproducible");
  // cross-run / cross-platform stability pinned against the splitmix64 transcript
  std::vector<std::string> ids;
  for (const auto& cl : pool) ids.push_back(cl.id);
  std::sort(ids.begin(), ids.end());
  Rng rng(7);
  for (std::size_t i = 0; i < 12; ++i) {
    const std::size_t j = i + rng.next() % (ids.size() - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(12);
  std::sort(ids.begin(), ids.end());
  same = true;
  for (std::size_t i = 0; i < 12; ++i) same = same && a[i].id == ids[i];
  c.expect(same, "sampling does not match the pinned splitmix64 sequence");
  c.finish();
}

void criterion_9_desk_slice() {
  Criterion c(9, "directional calibration sanity on a recorded desk slice");
  const char* scored_path = std::getenv("PCC_DESK_SCORED");
  if (!scored_path || !fs::exists(scored_path)) {
    c.skip("no recorded desk slice (set PCC_DESK_SCORED to a scored JSONL to enable)");
    return;
  }
  std::ifstream in(scored_path, std::ios::binary);
  std::vector<ScoredPrediction> by_pcc, by_verbal;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("pcc") || !j.contains("verbal") ||
        !j.contains("gold") || !j.contains("predicted")) {
      continue;
    }
    const auto gold = normalize_label(j["gold"].get<std::string>());
    const auto predicted = normalize_label(j["predicted"].get<std::string>());
    if (!gold || !predicted) continue;
    by_pcc.push_back({"", j["pcc"].get<double>(), *predicted, *gold});
    by_verbal.push_back({"", j["verbal"].get<double>(), *predicted, *gold});
  }
  if (by_pcc.size() < 20) {
    c.skip("recorded slice has fewer than 20 labeled rows");
    return;
  }
  const double ece_pcc = expected_calibration_error(by_pcc, 10).first;
  const double ece_verbal = expected_calibration_error(by_verbal, 10).first;
  c.expect(ece_pcc <= ece_verbal + 0.05,
           "pcc ECE " + std::to_string(ece_pcc) + " vs verbal " + std::to_string(ece_verbal));
  c.finish();
}

}  // namespace

int main() {
  std::vector<std::string> quadrant_prompts;
  std::vector<Claim> quadrant_claims;
  criterion_1_signals();
  criterion_2_combiner();
  criterion_3_metrics();
  criterion_4_routing();
  criterion_5_quadrants(quadrant_prompts, quadrant_claims);
  criterion_6_replay();
  criterion_7_prompts(quadrant_prompts, quadrant_claims);
  criterion_8_datasets();
  criterion_9_desk_slice();
  if (g_failures == 0) {
    std::cout << "acceptance: all criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << g_failures << " criteria failed\n";
  return 1;
}
