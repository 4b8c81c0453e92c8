#pragma once

#include "osa/channel.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace osa {

// Decision-epoch state: v = remaining data units, o/q = occupancy and quality
// masks (bit m-1 for channel m, 1 = idle/good), c = channel currently tuned
// to (1-based).
struct State {
  int v = 0;
  unsigned o = 0;
  unsigned q = 0;
  int c = 1;
  bool operator==(const State&) const = default;
};

// Action (b, n): b = 1 to transmit, 0 to stay silent; n = channel to tune to
// for this slot (n == c means stay).
struct Action {
  int b = 0;
  int n = 1;
  bool operator==(const Action&) const = default;
};

// Per-slot cost parameters.
struct CostParams {
  double silent = 0.0;    // sensing/idling cost when not transmitting
  double transmit = 0.0;  // active transmission cost
  double sw = 0.0;        // retuning cost when n != c
};

// Terminal penalty on unserved data: either quadratic L * v^2 or an explicit
// table w[0..V]. Must satisfy w(0) = 0, nondecreasing, convex increments.
struct PenaltySpec {
  enum class Kind { Quadratic, Table };
  Kind kind = Kind::Quadratic;
  double L = 0.0;
  std::vector<double> table;
  double value(int v) const;
};

struct InitialState {
  int v = -1;  // -1 means "use V"
  std::vector<std::uint8_t> occupancy;
  std::vector<std::uint8_t> quality;
  int channel = 0;  // 0 means "use min(3, M)"
};

// Full problem instance. D = number of decision slots; the terminal penalty
// is charged after slot D.
struct ScenarioConfig {
  int M = 0;
  int V = 0;
  int D = 0;
  int zeta = 1;  // coarsening stride for the threshold solver
  std::vector<ChannelParams> channels;
  RateParams rates;
  CostParams costs;
  PenaltySpec penalty;
  InitialState initial;

  State initial_state() const;
};

// Flat state enumeration: index = (v * 4^M + joint) * M + (c - 1), so v is
// the slowest axis and c the fastest. joint = o_mask * 2^M + q_mask.
struct StateSpace {
  int M = 0;
  int V = 0;
  long K = 0;  // 4^M

  StateSpace() = default;
  StateSpace(int M_, int V_) : M(M_), V(V_), K(1L << (2 * M_)) {}

  long size() const { return static_cast<long>(V + 1) * K * M; }
  long index(int v, long joint, int c) const {
    return (static_cast<long>(v) * K + joint) * M + (c - 1);
  }
  long index(const State& s) const { return index(s.v, joint_index(s.o, s.q, M), s.c); }
  State decode(long idx) const;
};

StateSpace state_space(const ScenarioConfig& cfg);

// Channels that are idle in occupancy mask o, ascending.
std::vector<int> idle_channels(unsigned o, int M);

// Units served in one slot by action a in state s: rates.good on an idle good
// target, rates.bad on an idle bad target, zero otherwise (including b = 0).
int transmission_rate(const ScenarioConfig& cfg, const State& s, const Action& a);

// Remaining data after serving r units, clamped at zero.
inline int next_remaining(int v, int r) { return v > r ? v - r : 0; }

// Admissible actions in canonical order:
//   (0, c); silent switches (0, n) for n != c ascending; then, when v > 0,
//   transmissions on idle channels ordered by quality descending, retune
//   distance |n - c| ascending, index ascending.
// The canonical order fixes argmin tie resolution everywhere in the solvers.
std::vector<Action> allowed_actions(const ScenarioConfig& cfg, const State& s);

bool is_allowed(const ScenarioConfig& cfg, const State& s, const Action& a);

// Slot cost; depends on (b, n vs c) and whether data remains. Throws
// std::invalid_argument when a is not admissible in s.
double stage_cost(const ScenarioConfig& cfg, const State& s, const Action& a);

// Unchecked core used by the solvers: cost given v > 0 flag, b, and retune.
double stage_cost_value(const CostParams& costs, bool has_data, int b, bool retune);

// All one-slot successors of (s, a) with positive probability, ascending in
// the successor's joint channel index. Probabilities sum to 1; the next tuned
// channel is a.n deterministically and v' = next_remaining(v, rate).
std::vector<std::pair<State, double>> successor_distribution(const ScenarioConfig& cfg,
                                                             const State& s, const Action& a);

// Structural validation of a whole instance (dimensions, stochasticity,
// penalty shape, initial state, zeta). Collects every issue found.
ValidationReport validate_config(const ScenarioConfig& cfg);

std::string to_string(const State& s);
std::string to_string(const Action& a);

}  // namespace osa
