#include "pcc/signals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pcc/errors.hpp"

namespace pcc {

bool TokenDistribution::valid() const {
  if (entries.empty()) return false;
  double sum = 0.0;
  double prev = 1.0;
  for (const auto& [tok, p] : entries) {
    if (p < 0.0 || p > 1.0) return false;
    if (p > prev) return false;  // must be descending
    prev = p;
    sum += p;
  }
  return sum <= 1.0 + 1e-6;
}

VerdictLexicon VerdictLexicon::defaults() {
  return VerdictLexicon{{"true", "yes"}, {"false", "no"}};
}

int VerdictLexicon::classify(const std::string& raw_token) const {
  const std::string norm = normalize_token(raw_token);
  if (true_tokens.count(norm)) return 1;
  if (false_tokens.count(norm)) return -1;
  return 0;
}

ContradictionMatrix ContradictionMatrix::from_raw(std::vector<std::vector<double>> forward,
                                                  std::vector<std::vector<double>> backward) {
  ContradictionMatrix m;
  m.forward = std::move(forward);
  m.backward = std::move(backward);
  m.pair_scores.resize(m.forward.size());
  for (std::size_t i = 0; i < m.forward.size(); ++i) {
    m.pair_scores[i].resize(m.forward[i].size());
    for (std::size_t j = 0; j < m.forward[i].size(); ++j) {
      m.pair_scores[i][j] = (m.forward[i][j] + m.backward[i][j]) / 2.0;
    }
  }
  return m;
}

std::string normalize_token(const std::string& token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(token[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(token[end - 1]))) --end;
  std::string out = token.substr(begin, end - begin);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::pair<double, double> aggregate_class_probabilities(const TokenDistribution& dist,
                                                        const VerdictLexicon& lexicon) {
  double p_true = 0.0;
  double p_false = 0.0;
  for (const auto& [tok, p] : dist.entries) {
    const int cls = lexicon.classify(tok);
    if (cls > 0) p_true += p;
    else if (cls < 0) p_false += p;
  }
  return {p_true, p_false};
}

double internal_certainty(const TokenDistribution& dist, const VerdictLexicon& lexicon,
                          bool strict, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (dist.entries.size() >= 2) {
    const int c1 = lexicon.classify(dist.entries[0].first);
    const int c2 = lexicon.classify(dist.entries[1].first);
    if (c1 != 0 && c1 == c2) return 1.0;
  }
  const auto [p_true, p_false] = aggregate_class_probabilities(dist, lexicon);
  if (p_true == 0.0 && p_false == 0.0) {
    const bool top_is_verdict = !dist.entries.empty() &&
                                lexicon.classify(dist.entries[0].first) != 0;
    if (!top_is_verdict) {
      if (strict) throw DegenerateDistribution("no verdict tokens in distribution");
      if (degenerate) *degenerate = true;
      return 0.0;
    }
  }
  return std::fabs(p_true - p_false);
}

double logistic_margin(double p_true, double p_false, double scale) {
  constexpr double kEps = 1e-9;
  const double m = std::log(p_true + kEps) - std::log(p_false + kEps);
  return 1.0 / (1.0 + std::exp(-m / scale));
}

double reasoning_consistency(const ContradictionMatrix& matrix) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : matrix.pair_scores) {
    for (double s : row) {
      sum += s;
      ++n;
    }
  }
  const double mean = n ? sum / static_cast<double>(n) : 0.0;
  return 1.0 - mean;
}

double combine_pcc(double certainty, double consistency) {
  const double denom = certainty + consistency;
  if (denom == 0.0) return 0.0;
  return 2.0 * certainty * consistency / denom;
}

std::pair<std::size_t, std::size_t> most_contradictory_pair(const ContradictionMatrix& matrix) {
  std::size_t best_i = 0;
  std::size_t best_j = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < matrix.pair_scores.size(); ++i) {
    for (std::size_t j = 0; j < matrix.pair_scores[i].size(); ++j) {
      if (matrix.pair_scores[i][j] > best) {
        best = matrix.pair_scores[i][j];
        best_i = i;
        best_j = j;
      }
    }
  }
  return {best_i, best_j};
}

}  // namespace pcc
