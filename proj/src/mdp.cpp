#include "osa/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace osa {

double PenaltySpec::value(int v) const {
  if (v < 0) throw std::out_of_range("penalty evaluated at negative v");
  if (kind == Kind::Quadratic) return L * static_cast<double>(v) * static_cast<double>(v);
  if (v >= static_cast<int>(table.size())) {
    throw std::out_of_range("penalty table has no entry for v = " + std::to_string(v));
  }
  return table[static_cast<size_t>(v)];
}

State ScenarioConfig::initial_state() const {
  State s;
  s.v = initial.v < 0 ? V : initial.v;
  s.o = pack_bits(initial.occupancy);
  s.q = pack_bits(initial.quality);
  s.c = initial.channel > 0 ? initial.channel : std::min(3, M);
  return s;
}

State StateSpace::decode(long idx) const {
  if (idx < 0 || idx >= size()) {
    throw std::out_of_range("state index " + std::to_string(idx) + " outside 0.." +
                            std::to_string(size() - 1));
  }
  State s;
  s.c = static_cast<int>(idx % M) + 1;
  long rest = idx / M;
  long joint = rest % K;
  s.v = static_cast<int>(rest / K);
  s.o = joint_o_mask(joint, M);
  s.q = joint_q_mask(joint, M);
  return s;
}

StateSpace state_space(const ScenarioConfig& cfg) { return StateSpace(cfg.M, cfg.V); }

std::vector<int> idle_channels(unsigned o, int M) {
  std::vector<int> idle;
  for (int m = 1; m <= M; ++m) {
    if ((o >> (m - 1)) & 1u) idle.push_back(m);
  }
  return idle;
}

int transmission_rate(const ScenarioConfig& cfg, const State& s, const Action& a) {
  if (a.b != 1) return 0;
  if (((s.o >> (a.n - 1)) & 1u) == 0) return 0;
  return ((s.q >> (a.n - 1)) & 1u) ? cfg.rates.good : cfg.rates.bad;
}

std::vector<Action> allowed_actions(const ScenarioConfig& cfg, const State& s) {
  std::vector<Action> actions;
  actions.push_back({0, s.c});
  for (int n = 1; n <= cfg.M; ++n) {
    if (n != s.c) actions.push_back({0, n});
  }
  if (s.v > 0) {
    std::vector<int> targets = idle_channels(s.o, cfg.M);
    std::sort(targets.begin(), targets.end(), [&](int lhs, int rhs) {
      int ql = (s.q >> (lhs - 1)) & 1u;
      int qr = (s.q >> (rhs - 1)) & 1u;
      if (ql != qr) return ql > qr;
      int dl = std::abs(lhs - s.c);
      int dr = std::abs(rhs - s.c);
      if (dl != dr) return dl < dr;
      return lhs < rhs;
    });
    for (int n : targets) actions.push_back({1, n});
  }
  return actions;
}

bool is_allowed(const ScenarioConfig& cfg, const State& s, const Action& a) {
  if (a.n < 1 || a.n > cfg.M) return false;
  if (a.b == 0) return true;
  if (a.b != 1) return false;
  if (s.v <= 0) return false;
  return ((s.o >> (a.n - 1)) & 1u) != 0;
}

double stage_cost_value(const CostParams& costs, bool has_data, int b, bool retune) {
  if (has_data) {
    double base = b ? costs.transmit : costs.silent;
    return retune ? base + costs.sw : base;
  }
  return retune ? costs.sw : 0.0;
}

double stage_cost(const ScenarioConfig& cfg, const State& s, const Action& a) {
  if (!is_allowed(cfg, s, a)) {
    throw std::invalid_argument("action " + to_string(a) + " not admissible in state " +
                                to_string(s));
  }
  return stage_cost_value(cfg.costs, s.v > 0, a.b, a.n != s.c);
}

std::vector<std::pair<State, double>> successor_distribution(const ScenarioConfig& cfg,
                                                             const State& s, const Action& a) {
  if (!is_allowed(cfg, s, a)) {
    throw std::invalid_argument("action " + to_string(a) + " not admissible in state " +
                                to_string(s));
  }
  int v_next = next_remaining(s.v, transmission_rate(cfg, s, a));
  long K = 1L << (2 * cfg.M);
  std::vector<std::pair<State, double>> out;
  out.reserve(static_cast<size_t>(K));
  for (long joint = 0; joint < K; ++joint) {
    unsigned o_next = joint_o_mask(joint, cfg.M);
    unsigned q_next = joint_q_mask(joint, cfg.M);
    double p = joint_step_prob_masks(cfg.channels, s.o, s.q, o_next, q_next);
    if (p == 0.0) continue;
    out.push_back({State{v_next, o_next, q_next, a.n}, p});
  }
  return out;
}

ValidationReport validate_config(const ScenarioConfig& cfg) {
  ValidationReport report;
  auto add = [&report](const std::string& where, const std::string& what) {
    report.issues.push_back({where, what});
  };

  if (cfg.M < 1) add("M", "must be >= 1, got " + std::to_string(cfg.M));
  if (cfg.M > 12) add("M", "channel counts above 12 exceed the dense state enumeration");
  if (cfg.V < 0) add("V", "must be >= 0, got " + std::to_string(cfg.V));
  if (cfg.D < 1) add("D", "must be >= 1, got " + std::to_string(cfg.D));
  if (cfg.zeta < 1) add("zeta", "must be >= 1, got " + std::to_string(cfg.zeta));

  if (static_cast<int>(cfg.channels.size()) != cfg.M) {
    add("channels", "expected " + std::to_string(cfg.M) + " entries, got " +
                        std::to_string(cfg.channels.size()));
  } else {
    ValidationReport chan = validate_channel_params(cfg.channels);
    report.issues.insert(report.issues.end(), chan.issues.begin(), chan.issues.end());
  }

  if (cfg.rates.bad < 0) add("rates.bad", "must be >= 0");
  if (cfg.rates.good < cfg.rates.bad) add("rates.good", "must be >= rates.bad");
  if (cfg.costs.silent < 0) add("costs.silent", "must be >= 0");
  if (cfg.costs.transmit < 0) add("costs.transmit", "must be >= 0");
  if (cfg.costs.sw < 0) add("costs.switch", "must be >= 0");

  if (cfg.penalty.kind == PenaltySpec::Kind::Quadratic) {
    if (cfg.penalty.L < 0) add("penalty.L", "must be >= 0");
  } else {
    const auto& w = cfg.penalty.table;
    if (static_cast<int>(w.size()) != cfg.V + 1) {
      add("penalty.values",
          "expected " + std::to_string(cfg.V + 1) + " entries, got " + std::to_string(w.size()));
    } else {
      if (!w.empty() && w[0] != 0.0) add("penalty.values", "entry for v = 0 must be 0");
      for (size_t v = 1; v < w.size(); ++v) {
        if (w[v] < w[v - 1]) {
          add("penalty.values", "decreasing at v = " + std::to_string(v));
          break;
        }
      }
      for (size_t v = 2; v < w.size(); ++v) {
        if (w[v] - w[v - 1] < w[v - 1] - w[v - 2] - 1e-12) {
          add("penalty.values", "increments not convex at v = " + std::to_string(v));
          break;
        }
      }
    }
  }

  if (cfg.M >= 1 && cfg.M <= 12) {
    if (static_cast<int>(cfg.initial.occupancy.size()) != cfg.M) {
      add("initial.occupancy", "expected " + std::to_string(cfg.M) + " bits");
    }
    if (static_cast<int>(cfg.initial.quality.size()) != cfg.M) {
      add("initial.quality", "expected " + std::to_string(cfg.M) + " bits");
    }
    int c1 = cfg.initial.channel > 0 ? cfg.initial.channel : std::min(3, cfg.M);
    if (c1 < 1 || c1 > cfg.M) add("initial.channel", "outside 1.." + std::to_string(cfg.M));
    int v1 = cfg.initial.v < 0 ? cfg.V : cfg.initial.v;
    if (v1 < 0 || v1 > cfg.V) add("initial.v", "outside 0.." + std::to_string(cfg.V));

    StateSpace space(cfg.M, std::max(cfg.V, 0));
    if (space.size() > 200'000'000L) {
      add("dimensions", "state space of " + std::to_string(space.size()) +
                            " entries exceeds the dense-solve limit");
    }
  }

  return report;
}

std::string to_string(const State& s) {
  // The state does not know M, so masks print as plain numbers here; the
  // report writers render channel-1-first bit strings where M is available.
  std::ostringstream out;
  out << "(v=" << s.v << ", o=" << s.o << ", q=" << s.q << ", c=" << s.c << ")";
  return out.str();
}

std::string to_string(const Action& a) {
  std::ostringstream out;
  out << "(b=" << a.b << ", n=" << a.n << ")";
  return out.str();
}

}  // namespace osa
