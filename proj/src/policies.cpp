#include "osa/policies.hpp"

#include <stdexcept>
#include <string>

namespace osa {

PolicyHandle always_staying(const ScenarioConfig& cfg) {
  PolicyHandle handle;
  handle.name = "always_staying";
  handle.act = [cfg](int, const State& s) -> Action {
    if (s.v > 0 && ((s.o >> (s.c - 1)) & 1u)) return {1, s.c};
    return {0, s.c};
  };
  return handle;
}

PolicyHandle quality_switching(const ScenarioConfig& cfg) {
  PolicyHandle handle;
  handle.name = "quality_switching";
  handle.act = [cfg](int, const State& s) -> Action {
    if (s.v <= 0) return {0, s.c};
    if ((s.o & ((1u << cfg.M) - 1u)) == 0) return {0, s.c};
    return {1, best_switch_target(s.o, s.q, s.c, cfg.M)};
  };
  return handle;
}

PolicyHandle optimal_from_table(const PolicyTable& policy) {
  PolicyHandle handle;
  handle.name = "optimal";
  handle.act = [policy](int t, const State& s) -> Action {
    if (t < 1 || t > policy.D) {
      throw std::out_of_range("stage " + std::to_string(t) + " outside 1.." +
                              std::to_string(policy.D));
    }
    return policy.at(t, policy.space.index(s));
  };
  return handle;
}

PolicyHandle optimal_from_thresholds(const ThresholdTable& thresholds,
                                     const ScenarioConfig& cfg) {
  PolicyHandle handle;
  handle.name = "optimal";
  handle.act = [thresholds, cfg](int t, const State& s) -> Action {
    return policy_from_thresholds(thresholds, cfg, t, s);
  };
  return handle;
}

}  // namespace osa
