#include "pcc/router.hpp"

namespace pcc {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::DirectAnswer: return "direct_answer";
    case Strategy::TargetedContradiction: return "targeted_contradiction";
    case Strategy::TargetedReflection: return "targeted_reflection";
    case Strategy::DeepSearch: return "deep_search";
  }
  return "unknown";
}

Strategy route(const ConfidenceSignals& signals, const RoutingThresholds& thresholds) {
  const bool certain = signals.certainty >= thresholds.alpha;
  const bool consistent = signals.consistency >= thresholds.beta;
  if (certain && consistent) return Strategy::DirectAnswer;
  if (certain) return Strategy::TargetedContradiction;
  if (consistent) return Strategy::TargetedReflection;
  return Strategy::DeepSearch;
}

}  // namespace pcc
