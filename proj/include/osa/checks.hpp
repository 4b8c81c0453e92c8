#pragma once

#include "osa/monotone.hpp"
#include "osa/solver.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace osa {

// Rate-based comparison of two admissible actions in the same channel state.
// FirstGeq means a1 serves at least as much data as a2. Since per-slot rates
// are totally ordered, Incomparable is never produced; it exists so callers
// can treat the result as a partial-order verdict.
enum class RateOrder { FirstGeq, SecondGeq, Both, Incomparable };

RateOrder action_rate_order(const ScenarioConfig& cfg, unsigned o, unsigned q, const Action& a1,
                            const Action& a2);

// One recorded violation of a structural property, with enough context to
// re-derive the failed inequality by hand.
struct Counterexample {
  int t = 0;
  State s;
  Action a1, a2;
  int v_hi = 0, v_lo = 0;
  double lhs = 0.0, rhs = 0.0;
  std::string detail;
};

struct CheckReport {
  std::string name;
  bool pass = true;
  long checked = 0;     // number of inequality instances examined
  long violations = 0;  // total violations found (counterexamples stores a prefix)
  std::vector<Counterexample> counterexamples;
  std::string summary() const;
};

// Verifies cost-to-go is nondecreasing in remaining data: for every stage
// t = 1..D+1 and every (o, q, c), U_t(v+1, .) >= U_t(v, .) - tol.
CheckReport check_value_monotone(const ValueTable& values, double tol = 1e-9,
                                 std::size_t max_counterexamples = 64);

// Tests the exchange inequality behind threshold optimality at stage t:
// for every channel state and every strictly rate-ordered pair of admissible
// actions (rate(a_hi) > rate(a_lo)), the gap
//   g(v) = Q_t(v, a_hi) - Q_t(v, a_lo)
// must be nonincreasing in v (checked on adjacent v with v >= 1, so both
// actions are admissible at both points). A violation g(v+1) > g(v) + tol is
// equivalently lhs > rhs with
//   lhs = Q(v+1, a_hi) + Q(v, a_lo),  rhs = Q(v+1, a_lo) + Q(v, a_hi).
CheckReport check_subadditivity(const ScenarioConfig& cfg, const ValueTable& values, int t,
                                double tol = 1e-9, std::size_t max_counterexamples = 64);

// Runs check_subadditivity for every stage t = 1..D and merges the reports.
CheckReport check_subadditivity_all(const ScenarioConfig& cfg, const ValueTable& values,
                                    double tol = 1e-9, std::size_t max_counterexamples = 64);

// Verifies each (t, o, q, c) slice of the policy is a monotone ladder in v:
// served rate nondecreasing in v, action changes only at rung boundaries, and
// the rung sequence matches the column's structural case (Case4 columns stay
// silent; Case1/2 use at most one rung; Case3 at most two, stay before
// switch).
CheckReport check_policy_monotone(const PolicyTable& policy, const ScenarioConfig& cfg,
                                  std::size_t max_counterexamples = 64);

}  // namespace osa
