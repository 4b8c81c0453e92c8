#pragma once

#include "osa/policies.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace osa {

struct TrajectoryStep {
  int t = 0;
  State s;
  Action a;
  int served = 0;    // data units delivered this slot
  double cost = 0.0; // slot cost charged for (s, a)
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // one entry per decision slot, t = 1..D
  State terminal_state;               // state entering the terminal stage
  double terminal_penalty = 0.0;
  double total_cost = 0.0;            // slot costs plus terminal penalty
};

// Simulates one episode from cfg.initial_state() under the given rule,
// drawing channel transitions from rng in the fixed per-channel order.
Trajectory rollout(const ScenarioConfig& cfg, const PolicyHandle& policy, std::mt19937_64& rng);

struct MonteCarloStats {
  double mean = 0.0;
  double std_err = 0.0;  // sample standard error of the mean
  long n = 0;
};

// Averages total cost over n independent rollouts. Rollout i uses the
// substream derived from (master_seed, i), so results are reproducible and
// independent of evaluation order.
MonteCarloStats monte_carlo(const ScenarioConfig& cfg, const PolicyHandle& policy, long n,
                            std::uint64_t master_seed);

struct SweepRow {
  int sweep_var = 0;        // grid value (data size or deadline)
  std::string policy;       // "optimal", "always_staying", "quality_switching"
  double mean = 0.0;        // Monte Carlo mean (NaN when rollouts == 0)
  double std_err = 0.0;     // Monte Carlo standard error (NaN when rollouts == 0)
  double exact_value = 0.0; // expected total cost by backward evaluation
  long n = 0;               // rollouts per point
};

struct SweepResult {
  std::string var_name;  // "V" or "D"
  std::vector<SweepRow> rows;
};

// Re-solves the instance at each grid value of total data size V (initial
// data tracks V) and reports exact and simulated cost for the optimal policy
// and both baselines. rollouts == 0 skips simulation.
SweepResult sweep_data_size(const ScenarioConfig& base, const std::vector<int>& grid,
                            long rollouts, std::uint64_t seed);

// Same sweep over the deadline D with V held fixed.
SweepResult sweep_deadline(const ScenarioConfig& base, const std::vector<int>& grid, long rollouts,
                           std::uint64_t seed);

// Compact action encoding for (t, v) decision surfaces:
//   0 = silent-stay, 1 = transmit-stay, 2 = transmit-switch, 3 = silent-switch.
// The exact solver never emits 3; it is defined so arbitrary policies can be
// plotted too.
int action_code(const State& s, const Action& a);

struct SurfaceCell {
  int t = 0;
  int v = 0;
  int code = 0;
  int target = 0;  // retune target for codes 2 and 3, else 0
};

// Dumps the (t, v) action grid of one channel-state column (o, q, c),
// t = 1..D outer, v = 0..V inner.
std::vector<SurfaceCell> dump_action_surface(const PolicyTable& policy,
                                             const ScenarioConfig& cfg, unsigned o, unsigned q,
                                             int c);

}  // namespace osa
