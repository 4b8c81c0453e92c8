#pragma once

#include "osa/mdp.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace osa {

// Shared argmin tie tolerance. A later action in canonical order replaces the
// incumbent only when it improves by more than this margin, so ties and
// last-ulp rounding noise always resolve to the earliest candidate.
inline constexpr double kSelectionTieTol = 1e-9;

// Expected-cost-to-go tables for stages t = 1..D+1 (layer D+1 is the terminal
// penalty). Values are indexed by StateSpace::index.
struct ValueTable {
  StateSpace space;
  int D = 0;
  std::vector<Eigen::VectorXd> layers;

  const Eigen::VectorXd& layer(int t) const { return layers.at(static_cast<size_t>(t - 1)); }
  Eigen::VectorXd& layer(int t) { return layers.at(static_cast<size_t>(t - 1)); }
};

// Deterministic Markov policy for stages t = 1..D.
struct PolicyTable {
  StateSpace space;
  int D = 0;
  std::vector<std::vector<Action>> stages;

  const Action& at(int t, long state_index) const {
    return stages.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(state_index));
  }
  Action& at(int t, long state_index) {
    return stages.at(static_cast<size_t>(t - 1)).at(static_cast<size_t>(state_index));
  }
};

// Precomputed continuation values for one stage transition:
//   at(n, joint, v') = sum over joint' (ascending) of
//                      kernel(joint, joint') * next_layer[index(v', joint', n)].
// The sum runs in the same order with the same doubles as enumerating
// successor_distribution, so q_value computed through this kernel is
// bit-identical to the explicit enumeration.
struct StageKernel {
  int M = 0;
  int V = 0;
  long K = 0;
  Eigen::MatrixXd cont;  // (M * K) rows, (V + 1) columns

  double at(int n, long joint, int v) const {
    return cont(static_cast<long>(n - 1) * K + joint, v);
  }
};

StageKernel build_stage_kernel(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& next_layer,
                               const StateSpace& space);

// One-step lookahead cost of action a in state s at stage t, against the
// provided cost-to-go layer for stage t+1.
double q_value(const ScenarioConfig& cfg, int t, const State& s, const Action& a,
               const Eigen::VectorXd& next_layer);

// Terminal layer: penalty(v), independent of channels.
Eigen::VectorXd terminal_layer(const ScenarioConfig& cfg);

struct SolveResult {
  ValueTable values;
  PolicyTable policy;
};

// Exact finite-horizon backward induction over the full state space. The
// stored policy achieves the stored values exactly; argmin ties resolve to
// the first admissible action in canonical order (within kSelectionTieTol).
SolveResult backward_induction(const ScenarioConfig& cfg);

// Expected total cost of an arbitrary deterministic Markov policy, computed
// by backward evaluation. policy(t, s) must return an admissible action.
ValueTable evaluate_policy(const ScenarioConfig& cfg,
                           const std::function<Action(int, const State&)>& policy);

// Cost-to-go read from the first stage layer.
double expected_total_cost(const ValueTable& values, const State& s1);

}  // namespace osa
