#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pcc {

struct ScoredPrediction {
  std::string claim_id;
  double confidence = 0.0;
  bool predicted = false;  // True/False verdict
  bool gold = false;

  bool correct() const { return predicted == gold; }
};

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

struct CalibrationReport {
  double ece = 0.0;
  std::optional<double> auroc;  // absent when correctness is degenerate
  std::vector<ReliabilityBin> bins;
  double macro_f1 = 0.0;
  double f1_true = 0.0;
  double f1_false = 0.0;
  std::size_t n = 0;
};

// Equal-width binning over ((m-1)/M, m/M]; confidence 0 lands in bin 1.
// Empty bins are kept in the output (count 0) but excluded from the sum.
std::pair<double, std::vector<ReliabilityBin>> expected_calibration_error(
    const std::vector<ScoredPrediction>& preds, int num_bins);

// Mann-Whitney probability that a correct prediction outscores an incorrect
// one, ties counted half. Throws DegenerateLabels if one class is empty.
double auroc(const std::vector<ScoredPrediction>& preds);

// ROC staircase from (0,0) to (1,1), one point per distinct threshold.
std::vector<std::pair<double, double>> roc_points(const std::vector<ScoredPrediction>& preds);

// (f1_true, f1_false, macro). Empty-denominator F1 is 0.
std::tuple<double, double, double> f1_scores(const std::vector<ScoredPrediction>& preds);

struct ScoreDistributionRecord {
  std::string claim_id;
  double score = 0.0;
  bool correct = false;
};

// Plot-ready per-prediction records, input order preserved.
std::vector<ScoreDistributionRecord> export_score_distribution(
    const std::vector<ScoredPrediction>& preds);

CalibrationReport calibration_report(const std::vector<ScoredPrediction>& preds, int num_bins);

}  // namespace pcc
