#include "pcc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pcc/errors.hpp"

namespace pcc {

namespace {

// Interval assignment per the equal-width definition: bin m holds
// p in ((m-1)/M, m/M]; p = 0 goes to bin 1. Returns 1-based index.
int bin_index(double p, int num_bins) {
  if (p <= 0.0) return 1;
  int m = static_cast<int>(std::ceil(p * num_bins));
  if (m < 1) m = 1;
  if (m > num_bins) m = num_bins;
  while (m > 1 && p <= static_cast<double>(m - 1) / num_bins) --m;
  while (m < num_bins && p > static_cast<double>(m) / num_bins) ++m;
  return m;
}

}  // namespace

std::pair<double, std::vector<ReliabilityBin>> expected_calibration_error(
    const std::vector<ScoredPrediction>& preds, int num_bins) {
  if (preds.empty()) throw EmptyInput("ECE needs at least one prediction");
  if (num_bins < 1) throw EmptyInput("ECE needs at least one bin");

  std::vector<ReliabilityBin> bins(num_bins);
  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<double> acc_sum(num_bins, 0.0);
  for (int m = 0; m < num_bins; ++m) {
    bins[m].lower = static_cast<double>(m) / num_bins;
    bins[m].upper = static_cast<double>(m + 1) / num_bins;
  }
  for (const auto& p : preds) {
    const int m = bin_index(p.confidence, num_bins) - 1;
    ++bins[m].count;
    conf_sum[m] += p.confidence;
    acc_sum[m] += p.correct() ? 1.0 : 0.0;
  }
  double ece = 0.0;
  const double n = static_cast<double>(preds.size());
  for (int m = 0; m < num_bins; ++m) {
    if (bins[m].count == 0) continue;
    bins[m].mean_confidence = conf_sum[m] / bins[m].count;
    bins[m].accuracy = acc_sum[m] / bins[m].count;
    ece += (bins[m].count / n) * std::fabs(bins[m].accuracy - bins[m].mean_confidence);
  }
  return {ece, bins};
}

double auroc(const std::vector<ScoredPrediction>& preds) {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (const auto& p : preds) (p.correct() ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateLabels("AUROC undefined: all predictions share one correctness value");
  }
  // Tie-averaged rank sum over the correct predictions.
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(preds.size());
  for (const auto& p : preds) scored.emplace_back(p.confidence, p.correct());
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (scored[t].second) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<std::pair<double, double>> roc_points(const std::vector<ScoredPrediction>& preds) {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (const auto& p : preds) (p.correct() ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateLabels("ROC undefined: all predictions share one correctness value");
  }
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(preds.size());
  for (const auto& p : preds) scored.emplace_back(p.confidence, p.correct());
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<std::pair<double, double>> points{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    for (std::size_t t = i; t < j; ++t) (scored[t].second ? tp : fp)++;
    points.emplace_back(static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos);
    i = j;
  }
  return points;
}

std::tuple<double, double, double> f1_scores(const std::vector<ScoredPrediction>& preds) {
  if (preds.empty()) return {0.0, 0.0, 0.0};
  // confusion counts with True as the positive class
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& p : preds) {
    if (p.predicted && p.gold) ++tp;
    else if (p.predicted && !p.gold) ++fp;
    else if (!p.predicted && p.gold) ++fn;
    else ++tn;
  }
  auto f1 = [](std::size_t tp_, std::size_t fp_, std::size_t fn_) {
    const double denom = 2.0 * tp_ + fp_ + fn_;
    return denom == 0.0 ? 0.0 : 2.0 * tp_ / denom;
  };
  const double f1_true = f1(tp, fp, fn);
  const double f1_false = f1(tn, fn, fp);  // False as positive class swaps fp/fn
  return {f1_true, f1_false, (f1_true + f1_false) / 2.0};
}

std::vector<ScoreDistributionRecord> export_score_distribution(
    const std::vector<ScoredPrediction>& preds) {
  std::vector<ScoreDistributionRecord> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back({p.claim_id, p.confidence, p.correct()});
  return out;
}

CalibrationReport calibration_report(const std::vector<ScoredPrediction>& preds, int num_bins) {
  CalibrationReport report;
  report.n = preds.size();
  auto [ece, bins] = expected_calibration_error(preds, num_bins);
  report.ece = ece;
  report.bins = std::move(bins);
  try {
    report.auroc = auroc(preds);
  } catch (const DegenerateLabels&) {
    report.auroc = std::nullopt;
  }
  auto [f1_true, f1_false, macro] = f1_scores(preds);
  report.f1_true = f1_true;
  report.f1_false = f1_false;
  report.macro_f1 = macro;
  return report;
}

}  // namespace pcc
