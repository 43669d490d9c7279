#pragma once

#include <string>

#include "pcc/signals.hpp"

namespace pcc {

struct RoutingThresholds {
  double alpha = 0.5;
  double beta = 0.5;

  bool valid() const { return alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0; }
};

enum class Strategy {
  DirectAnswer,
  TargetedContradiction,
  TargetedReflection,
  DeepSearch,
};

const char* strategy_name(Strategy s);

// Quadrant routing on (tau, gamma); boundaries are inclusive.
Strategy route(const ConfidenceSignals& signals, const RoutingThresholds& thresholds);

}  // namespace pcc
