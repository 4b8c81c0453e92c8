#pragma once

#include "osa/monotone.hpp"
#include "osa/solver.hpp"

#include <functional>
#include <string>

namespace osa {

// A named decision rule: maps (stage, state) to an admissible action.
struct PolicyHandle {
  std::string name;
  std::function<Action(int, const State&)> act;
};

// Baseline: never retunes. Transmits on the current channel whenever data
// remains and the channel is idle; otherwise stays silent.
PolicyHandle always_staying(const ScenarioConfig& cfg);

// Baseline: while data remains, transmits on the best idle channel (quality
// first, then retune distance, then index), retuning if that channel is not
// the current one; silent-stay when nothing is idle or no data remains.
PolicyHandle quality_switching(const ScenarioConfig& cfg);

// Adapters exposing solver output as decision rules.
PolicyHandle optimal_from_table(const PolicyTable& policy);
PolicyHandle optimal_from_thresholds(const ThresholdTable& thresholds, const ScenarioConfig& cfg);

}  // namespace osa
