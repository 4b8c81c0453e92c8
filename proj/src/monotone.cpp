#include "osa/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace osa {

CaseTag classify_case(unsigned o, unsigned q, int c, int M) {
  if (c < 1 || c > M) {
    throw std::out_of_range("channel " + std::to_string(c) + " outside 1.." + std::to_string(M));
  }
  unsigned idle_mask = o & ((1u << M) - 1u);
  if (idle_mask == 0) return CaseTag::Case4;
  bool c_idle = ((o >> (c - 1)) & 1u) != 0;
  if (!c_idle) return CaseTag::Case2;
  int q_c = (q >> (c - 1)) & 1u;
  int q_max = 0;
  for (int m = 1; m <= M; ++m) {
    if (((o >> (m - 1)) & 1u) && (((q >> (m - 1)) & 1u) != 0)) {
      q_max = 1;
      break;
    }
  }
  return q_c >= q_max ? CaseTag::Case1 : CaseTag::Case3;
}

int best_switch_target(unsigned o, unsigned q, int c, int M) {
  std::vector<int> idle = idle_channels(o, M);
  if (idle.empty()) {
    throw std::invalid_argument("no idle channel to switch to");
  }
  int q_max = 0;
  for (int m : idle) q_max = std::max(q_max, static_cast<int>((q >> (m - 1)) & 1u));
  int best = 0;
  int best_dist = 1 << 30;
  for (int m : idle) {
    if (static_cast<int>((q >> (m - 1)) & 1u) != q_max) continue;
    int dist = std::abs(m - c);
    if (best == 0 || dist < best_dist || (dist == best_dist && m < best)) {
      best = m;
      best_dist = dist;
    }
  }
  return best;
}

namespace {

// Candidate actions for a non-Case4 column at v >= 1: silent-stay followed by
// the transmit block in canonical order. Silent switches are omitted — the
// exact argmin never takes them (retuning silently costs the switch price now
// without beating the option of retuning later), so the restriction leaves
// the selected action unchanged.
std::vector<Action> ladder_candidates(const ScenarioConfig& cfg, unsigned o, unsigned q, int c) {
  State probe{1, o, q, c};
  std::vector<Action> all = allowed_actions(cfg, probe);
  std::vector<Action> out;
  out.reserve(all.size());
  for (const Action& a : all) {
    if (a.b == 1 || (a.b == 0 && a.n == c)) out.push_back(a);
  }
  return out;
}

}  // namespace

MonotoneResult monotone_backward_induction(const ScenarioConfig& cfg) {
  if (cfg.zeta < 1) throw std::invalid_argument("zeta must be >= 1");
  StateSpace space = state_space(cfg);
  Eigen::MatrixXd kernel = joint_kernel(cfg.channels);

  MonotoneResult result;
  result.values.space = space;
  result.values.D = cfg.D;
  result.values.layers.assign(static_cast<size_t>(cfg.D + 1), Eigen::VectorXd());
  result.values.layer(cfg.D + 1) = terminal_layer(cfg);
  result.policy.space = space;
  result.policy.D = cfg.D;
  result.policy.stages.assign(static_cast<size_t>(cfg.D),
                              std::vector<Action>(static_cast<size_t>(space.size())));
  result.thresholds.space = space;
  result.thresholds.D = cfg.D;
  result.thresholds.stages.assign(
      static_cast<size_t>(cfg.D),
      std::vector<ThresholdRow>(static_cast<size_t>(space.K * space.M)));

  std::vector<Action> emitted(static_cast<size_t>(space.V + 1));

  for (int t = cfg.D; t >= 1; --t) {
    StageKernel sk = build_stage_kernel(kernel, result.values.layer(t + 1), space);
    Eigen::VectorXd& layer = result.values.layer(t);
    layer.resize(space.size());
    std::vector<Action>& stage = result.policy.stages[static_cast<size_t>(t - 1)];
    std::vector<ThresholdRow>& rows = result.thresholds.stages[static_cast<size_t>(t - 1)];

    for (long joint = 0; joint < space.K; ++joint) {
      unsigned o = joint_o_mask(joint, cfg.M);
      unsigned q = joint_q_mask(joint, cfg.M);
      for (int c = 1; c <= space.M; ++c) {
        CaseTag tag = classify_case(o, q, c, cfg.M);

        if (tag == CaseTag::Case4) {
          for (int v = 0; v <= space.V; ++v) emitted[static_cast<size_t>(v)] = {0, c};
        } else {
          std::vector<Action> candidates = ladder_candidates(cfg, o, q, c);
          int last_scanned = 0;
          for (int v = 0; v <= space.V; ++v) {
            if (v % cfg.zeta != 0) {
              // unscanned level: inherit the rung selected at the last
              // scanned level below
              emitted[static_cast<size_t>(v)] = emitted[static_cast<size_t>(last_scanned)];
              continue;
            }
            last_scanned = v;
            if (v == 0) {
              emitted[0] = {0, c};
              continue;
            }
            State s{v, o, q, c};
            Action best = candidates.front();
            double best_q =
                stage_cost_value(cfg.costs, true, best.b, best.n != c) +
                sk.at(best.n, joint, next_remaining(v, transmission_rate(cfg, s, best)));
            for (size_t i = 1; i < candidates.size(); ++i) {
              const Action& a = candidates[i];
              double qa = stage_cost_value(cfg.costs, true, a.b, a.n != c) +
                          sk.at(a.n, joint, next_remaining(v, transmission_rate(cfg, s, a)));
              if (qa < best_q - kSelectionTieTol) {
                best = a;
                best_q = qa;
              }
            }
            emitted[static_cast<size_t>(v)] = best;
          }
        }

        // Value layer: exact one-step evaluation of the emitted action at
        // every v, through the same kernel accumulation as the exact solver.
        for (int v = 0; v <= space.V; ++v) {
          const Action& a = emitted[static_cast<size_t>(v)];
          State s{v, o, q, c};
          long idx = space.index(v, joint, c);
          layer[idx] = stage_cost_value(cfg.costs, v > 0, a.b, a.n != c) +
                       sk.at(a.n, joint, next_remaining(v, transmission_rate(cfg, s, a)));
          stage[static_cast<size_t>(idx)] = a;
        }

        // Threshold extraction from the emitted column.
        ThresholdRow row;
        row.tag = tag;
        int first_tx = space.V + 1;
        int first_switch_tx = space.V + 1;
        for (int v = 0; v <= space.V; ++v) {
          const Action& a = emitted[static_cast<size_t>(v)];
          if (a.b == 1 && first_tx > space.V) first_tx = v;
          if (a.b == 1 && a.n != c && first_switch_tx > space.V) {
            first_switch_tx = v;
            break;
          }
        }
        switch (tag) {
          case CaseTag::Case1:
            row.th[0] = first_tx;
            break;
          case CaseTag::Case2:
            row.th[1] = first_tx;
            row.target = first_tx <= space.V
                             ? emitted[static_cast<size_t>(first_tx)].n
                             : best_switch_target(o, q, c, cfg.M);
            break;
          case CaseTag::Case3:
            row.th[2] = first_tx;
            row.th[3] = first_switch_tx;
            row.target = first_switch_tx <= space.V
                             ? emitted[static_cast<size_t>(first_switch_tx)].n
                             : best_switch_target(o, q, c, cfg.M);
            break;
          case CaseTag::Case4:
          case CaseTag::Other:
            break;
        }
        rows[static_cast<size_t>(joint * space.M + (c - 1))] = row;
      }
    }
  }
  return result;
}

Action policy_from_thresholds(const ThresholdTable& thresholds, const ScenarioConfig& cfg, int t,
                              const State& s) {
  if (t < 1 || t > thresholds.D) {
    throw std::out_of_range("stage " + std::to_string(t) + " outside 1.." +
                            std::to_string(thresholds.D));
  }
  long joint = joint_index(s.o, s.q, cfg.M);
  const ThresholdRow& row = thresholds.row(t, joint, s.c);
  switch (row.tag) {
    case CaseTag::Case1:
      if (s.v >= row.th[0]) return {1, s.c};
      return {0, s.c};
    case CaseTag::Case2:
      if (s.v >= row.th[1]) return {1, row.target};
      return {0, s.c};
    case CaseTag::Case3:
      if (s.v >= row.th[3]) return {1, row.target};
      if (s.v >= row.th[2]) return {1, s.c};
      return {0, s.c};
    case CaseTag::Case4:
    case CaseTag::Other:
      return {0, s.c};
  }
  return {0, s.c};
}

}  // namespace osa
