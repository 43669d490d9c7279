#include <doctest.h>

#include <string>

#include "pcc/router.hpp"
#include "test_support.hpp"

using namespace pcc;

namespace {

ConfidenceSignals sig(double tau, double gamma) {
  ConfidenceSignals s;
  s.certainty = tau;
  s.consistency = gamma;
  return s;
}

// Independent transcription of the quadrant table.
Strategy oracle_route(double tau, double gamma, double alpha, double beta) {
  const bool hi_tau = tau >= alpha;
  const bool hi_gamma = gamma >= beta;
  if (hi_tau && hi_gamma) return Strategy::DirectAnswer;
  if (hi_tau) return Strategy::TargetedContradiction;
  if (hi_gamma) return Strategy::TargetedReflection;
  return Strategy::DeepSearch;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(std::string(strategy_name(Strategy::DirectAnswer)) == "direct_answer");
  CHECK(std::string(strategy_name(Strategy::TargetedContradiction)) == "targeted_contradiction");
  CHECK(std::string(strategy_name(Strategy::TargetedReflection)) == "targeted_reflection");
  CHECK(std::string(strategy_name(Strategy::DeepSearch)) == "deep_search");
}

TEST_CASE("quadrant routing with default thresholds") {
  const RoutingThresholds t;  // 0.5 / 0.5
  CHECK(route(sig(0.9, 0.9), t) == Strategy::DirectAnswer);
  CHECK(route(sig(0.9, 0.1), t) == Strategy::TargetedContradiction);
  CHECK(route(sig(0.1, 0.9), t) == Strategy::TargetedReflection);
  CHECK(route(sig(0.1, 0.1), t) == Strategy::DeepSearch);
}

TEST_CASE("threshold boundaries are inclusive") {
  const RoutingThresholds t{0.5, 0.5};
  CHECK(route(sig(0.5, 0.5), t) == Strategy::DirectAnswer);
  CHECK(route(sig(0.5, 0.4999999), t) == Strategy::TargetedContradiction);
  CHECK(route(sig(0.4999999, 0.5), t) == Strategy::TargetedReflection);
  const RoutingThresholds u{0.3, 0.7};
  CHECK(route(sig(0.3, 0.7), u) == Strategy::DirectAnswer);
  CHECK(route(sig(0.3, 0.69), u) == Strategy::TargetedContradiction);
  CHECK(route(sig(0.29, 0.7), u) == Strategy::TargetedReflection);
  CHECK(route(sig(0.29, 0.69), u) == Strategy::DeepSearch);
}

TEST_CASE("routing is total and matches the quadrant table on a 101x101 grid") {
  const double pairs[9][2] = {{0.1, 0.1}, {0.1, 0.5}, {0.1, 0.9}, {0.5, 0.1}, {0.5, 0.5},
                              {0.5, 0.9}, {0.9, 0.1}, {0.9, 0.5}, {0.9, 0.9}};
  for (const auto& p : pairs) {
    const RoutingThresholds t{p[0], p[1]};
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        const double tau = i / 100.0;
        const double gamma = j / 100.0;
        CHECK(route(sig(tau, gamma), t) == oracle_route(tau, gamma, t.alpha, t.beta));
      }
    }
  }
}

TEST_CASE("threshold validity is the open unit interval") {
  CHECK(RoutingThresholds{0.5, 0.5}.valid());
  CHECK_FALSE(RoutingThresholds{0.0, 0.5}.valid());
  CHECK_FALSE(RoutingThresholds{0.5, 1.0}.valid());
  CHECK_FALSE(RoutingThresholds{-0.1, 0.5}.valid());
}
