#include "osa/solver.hpp"

#include <stdexcept>
#include <string>

namespace osa {

namespace {

void require_layer_size(const Eigen::VectorXd& layer, const StateSpace& space) {
  if (layer.size() != space.size()) {
    throw std::invalid_argument("layer has " + std::to_string(layer.size()) +
                                " entries, state space has " + std::to_string(space.size()));
  }
}

void require_stage(int t, int lo, int hi) {
  if (t < lo || t > hi) {
    throw std::out_of_range("stage " + std::to_string(t) + " outside " + std::to_string(lo) +
                            ".." + std::to_string(hi));
  }
}

}  // namespace

StageKernel build_stage_kernel(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& next_layer,
                               const StateSpace& space) {
  require_layer_size(next_layer, space);
  if (kernel.rows() != space.K || kernel.cols() != space.K) {
    throw std::invalid_argument("joint kernel dimensions do not match the state space");
  }
  StageKernel sk;
  sk.M = space.M;
  sk.V = space.V;
  sk.K = space.K;
  sk.cont.resize(space.M * space.K, space.V + 1);
  // Accumulate each continuation value as a plain left-to-right sum over
  // ascending successor joint index. q_value enumerates successors in the
  // same order with the same doubles, so both paths agree bitwise.
  for (int n = 1; n <= space.M; ++n) {
    for (long joint = 0; joint < space.K; ++joint) {
      for (int v = 0; v <= space.V; ++v) {
        double acc = 0.0;
        for (long to = 0; to < space.K; ++to) {
          acc += kernel(joint, to) * next_layer[space.index(v, to, n)];
        }
        sk.cont(static_cast<long>(n - 1) * space.K + joint, v) = acc;
      }
    }
  }
  return sk;
}

double q_value(const ScenarioConfig& cfg, int t, const State& s, const Action& a,
               const Eigen::VectorXd& next_layer) {
  require_stage(t, 1, cfg.D);
  StateSpace space = state_space(cfg);
  require_layer_size(next_layer, space);
  double cost = stage_cost(cfg, s, a);  // also rejects inadmissible actions
  int v_next = next_remaining(s.v, transmission_rate(cfg, s, a));
  double acc = 0.0;
  for (long to = 0; to < space.K; ++to) {
    double p = joint_step_prob_masks(cfg.channels, s.o, s.q, joint_o_mask(to, cfg.M),
                                     joint_q_mask(to, cfg.M));
    acc += p * next_layer[space.index(v_next, to, a.n)];
  }
  return cost + acc;
}

Eigen::VectorXd terminal_layer(const ScenarioConfig& cfg) {
  StateSpace space = state_space(cfg);
  Eigen::VectorXd layer(space.size());
  for (int v = 0; v <= space.V; ++v) {
    double w = cfg.penalty.value(v);
    for (long joint = 0; joint < space.K; ++joint) {
      for (int c = 1; c <= space.M; ++c) layer[space.index(v, joint, c)] = w;
    }
  }
  return layer;
}

SolveResult backward_induction(const ScenarioConfig& cfg) {
  StateSpace space = state_space(cfg);
  Eigen::MatrixXd kernel = joint_kernel(cfg.channels);

  SolveResult result;
  result.values.space = space;
  result.values.D = cfg.D;
  result.values.layers.assign(static_cast<size_t>(cfg.D + 1), Eigen::VectorXd());
  result.values.layer(cfg.D + 1) = terminal_layer(cfg);
  result.policy.space = space;
  result.policy.D = cfg.D;
  result.policy.stages.assign(static_cast<size_t>(cfg.D),
                              std::vector<Action>(static_cast<size_t>(space.size())));

  for (int t = cfg.D; t >= 1; --t) {
    StageKernel sk = build_stage_kernel(kernel, result.values.layer(t + 1), space);
    Eigen::VectorXd& layer = result.values.layer(t);
    layer.resize(space.size());
    std::vector<Action>& stage = result.policy.stages[static_cast<size_t>(t - 1)];

    for (int v = 0; v <= space.V; ++v) {
      for (long joint = 0; joint < space.K; ++joint) {
        unsigned o = joint_o_mask(joint, cfg.M);
        unsigned q = joint_q_mask(joint, cfg.M);
        for (int c = 1; c <= space.M; ++c) {
          State s{v, o, q, c};
          std::vector<Action> actions = allowed_actions(cfg, s);
          Action best = actions.front();
          double best_q = stage_cost_value(cfg.costs, v > 0, best.b, best.n != c) +
                          sk.at(best.n, joint, next_remaining(v, transmission_rate(cfg, s, best)));
          for (size_t i = 1; i < actions.size(); ++i) {
            const Action& a = actions[i];
            double qa = stage_cost_value(cfg.costs, v > 0, a.b, a.n != c) +
                        sk.at(a.n, joint, next_remaining(v, transmission_rate(cfg, s, a)));
            if (qa < best_q - kSelectionTieTol) {
              best = a;
              best_q = qa;
            }
          }
          long idx = space.index(v, joint, c);
          layer[idx] = best_q;
          stage[static_cast<size_t>(idx)] = best;
        }
      }
    }
  }
  return result;
}

ValueTable evaluate_policy(const ScenarioConfig& cfg,
                           const std::function<Action(int, const State&)>& policy) {
  StateSpace space = state_space(cfg);
  Eigen::MatrixXd kernel = joint_kernel(cfg.channels);

  ValueTable values;
  values.space = space;
  values.D = cfg.D;
  values.layers.assign(static_cast<size_t>(cfg.D + 1), Eigen::VectorXd());
  values.layer(cfg.D + 1) = terminal_layer(cfg);

  for (int t = cfg.D; t >= 1; --t) {
    StageKernel sk = build_stage_kernel(kernel, values.layer(t + 1), space);
    Eigen::VectorXd& layer = values.layer(t);
    layer.resize(space.size());
    for (int v = 0; v <= space.V; ++v) {
      for (long joint = 0; joint < space.K; ++joint) {
        unsigned o = joint_o_mask(joint, cfg.M);
        unsigned q = joint_q_mask(joint, cfg.M);
        for (int c = 1; c <= space.M; ++c) {
          State s{v, o, q, c};
          Action a = policy(t, s);
          if (!is_allowed(cfg, s, a)) {
            throw std::invalid_argument("policy returned inadmissible action " + to_string(a) +
                                        " in state " + to_string(s) + " at stage " +
                                        std::to_string(t));
          }
          layer[space.index(v, joint, c)] =
              stage_cost_value(cfg.costs, v > 0, a.b, a.n != c) +
              sk.at(a.n, joint, next_remaining(v, transmission_rate(cfg, s, a)));
        }
      }
    }
  }
  return values;
}

double expected_total_cost(const ValueTable& values, const State& s1) {
  return values.layer(1)[values.space.index(s1)];
}

}  // namespace osa
