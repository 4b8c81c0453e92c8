#pragma once

#include "osa/solver.hpp"

#include <array>

namespace osa {

// Structural class of a channel-state column (o, q, c):
//   Case1: current channel idle and its quality ties the best idle quality —
//          the decision is silent-stay vs transmit-stay, a single threshold.
//   Case2: current channel busy but some channel is idle — silent-stay vs
//          transmit-switch, a single threshold.
//   Case3: current channel idle but a strictly better idle channel exists —
//          silent-stay, then transmit-stay, then transmit-switch: two
//          thresholds.
//   Case4: no idle channel — silent-stay is the only sensible action.
// The classification is exhaustive; Other is kept for API completeness but
// is never produced.
enum class CaseTag : int { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4, Other = 0 };

CaseTag classify_case(unsigned o, unsigned q, int c, int M);

// Preferred retune target: among idle channels of maximal quality, the one
// closest to c (ties to the smaller index). Throws std::invalid_argument when
// no channel is idle.
int best_switch_target(unsigned o, unsigned q, int c, int M);

// Thresholds on remaining data for one (t, o, q, c) column. th[k-1] holds
// th_k; entries are -1 when the case does not use that threshold and V + 1
// when the rung is never reached. Meaning by case:
//   Case1: v >= th1 -> (1, c)                       (th2..th4 = -1)
//   Case2: v >= th2 -> (1, target)                  (others = -1)
//   Case3: v >= th3 -> (1, c); v >= th4 -> (1, target)
//   Case4: always (0, c)                            (all -1)
struct ThresholdRow {
  CaseTag tag = CaseTag::Other;
  int target = 0;  // retune target used by the switching rung, 0 if unused
  std::array<int, 4> th{-1, -1, -1, -1};
};

struct ThresholdTable {
  StateSpace space;
  int D = 0;
  // stages[t-1][joint * M + (c-1)]
  std::vector<std::vector<ThresholdRow>> stages;

  const ThresholdRow& row(int t, long joint, int c) const {
    return stages.at(static_cast<size_t>(t - 1))
        .at(static_cast<size_t>(joint * space.M + (c - 1)));
  }
};

struct MonotoneResult {
  ValueTable values;
  PolicyTable policy;
  ThresholdTable thresholds;
};

// Structure-exploiting backward induction. Per stage and channel-state
// column it selects, for each scanned v (v = 0, zeta, 2*zeta, ...), among the
// case ladder {silent-stay, admissible transmissions} using the same
// canonical order and tie tolerance as backward_induction; silent switches
// are never selected by the exact solver (retuning silently now can never
// beat retuning later by more than the switch cost), so dropping them leaves
// the selected policy unchanged. Unscanned v inherit the last scanned rung.
// Values are exact one-step evaluations of the emitted policy, so at
// zeta = 1 values and policy agree bitwise with backward_induction; at
// zeta > 1 values are an upper bound on the optimum.
MonotoneResult monotone_backward_induction(const ScenarioConfig& cfg);

// Decision rule induced by a threshold table. Wherever the emitted policy
// column follows its case ladder with a single retune target — which
// check_policy_monotone verifies — this reproduces that policy exactly; for
// columns that break the ladder structure the thresholds are a lossy summary
// (first rung boundaries only).
Action policy_from_thresholds(const ThresholdTable& thresholds, const ScenarioConfig& cfg, int t,
                              const State& s);

}  // namespace osa
