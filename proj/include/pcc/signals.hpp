#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pcc {

// Top-k next-token distribution, ordered descending by probability.
// Probabilities need not sum to 1 (truncated top-k is allowed).
struct TokenDistribution {
  std::vector<std::pair<std::string, double>> entries;

  bool valid() const;
};

// Disjoint token sets mapping tokens to True/False verdict classes.
// Lookup happens after normalization (strip + case-fold).
struct VerdictLexicon {
  std::set<std::string> true_tokens;
  std::set<std::string> false_tokens;

  static VerdictLexicon defaults();

  // -1 false, +1 true, 0 neither.
  int classify(const std::string& raw_token) const;
};

// K assume-true and K assume-false rationale texts.
struct RationaleSet {
  std::vector<std::string> supporting;
  std::vector<std::string> refuting;

  std::size_t k() const { return supporting.size(); }
};

// KxK contradiction grid. pair_scores[i][j] is the symmetrized
// contradiction between supporting rationale i and refuting rationale j.
struct ContradictionMatrix {
  std::vector<std::vector<double>> forward;   // phi(r+_i, r-_j)
  std::vector<std::vector<double>> backward;  // phi(r-_j, r+_i)
  std::vector<std::vector<double>> pair_scores;

  std::size_t k() const { return pair_scores.size(); }

  // Builds pair_scores = (forward + backward) / 2 from raw grids.
  static ContradictionMatrix from_raw(std::vector<std::vector<double>> forward,
                                      std::vector<std::vector<double>> backward);
};

struct ConfidenceSignals {
  double certainty = 0.0;    // tau
  double consistency = 0.0;  // gamma
  double pcc = 0.0;          // harmonic combination
  double class_prob_true = 0.0;
  double class_prob_false = 0.0;
  double margin = 0.0;  // log-probability margin, informational
};

// strip surrounding whitespace + ASCII case-fold
std::string normalize_token(const std::string& token);

std::pair<double, double> aggregate_class_probabilities(const TokenDistribution& dist,
                                                        const VerdictLexicon& lexicon);

// Two-case certainty: 1 when the top two tokens agree on a verdict class,
// |p_T - p_F| otherwise. When no verdict token carries any mass and neither
// top token is a verdict token, the distribution is degenerate: strict mode
// throws DegenerateDistribution, default mode returns 0 and sets *degenerate.
double internal_certainty(const TokenDistribution& dist, const VerdictLexicon& lexicon,
                          bool strict = false, bool* degenerate = nullptr);

// Logistic squash of the log-probability margin, for the margin-based
// evaluation path. epsilon 1e-9.
double logistic_margin(double p_true, double p_false, double scale = 1.0);

double reasoning_consistency(const ContradictionMatrix& matrix);

double combine_pcc(double certainty, double consistency);

// Argmax over pair_scores, ties broken by smallest (i, j).
std::pair<std::size_t, std::size_t> most_contradictory_pair(const ContradictionMatrix& matrix);

}  // namespace pcc
