#include "osa/sim.hpp"

#include "osa/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace osa {

Trajectory rollout(const ScenarioConfig& cfg, const PolicyHandle& policy, std::mt19937_64& rng) {
  Trajectory traj;
  traj.steps.reserve(static_cast<size_t>(cfg.D));
  State s = cfg.initial_state();
  double total = 0.0;
  for (int t = 1; t <= cfg.D; ++t) {
    Action a = policy.act(t, s);
    if (!is_allowed(cfg, s, a)) {
      throw std::invalid_argument("policy " + policy.name + " returned inadmissible action " +
                                  to_string(a) + " in state " + to_string(s) + " at stage " +
                                  std::to_string(t));
    }
    TrajectoryStep step;
    step.t = t;
    step.s = s;
    step.a = a;
    step.served = transmission_rate(cfg, s, a);
    step.cost = stage_cost(cfg, s, a);
    total += step.cost;
    traj.steps.push_back(step);

    ChannelStateVector from{unpack_bits(s.o, cfg.M), unpack_bits(s.q, cfg.M)};
    ChannelStateVector to = sample_joint_step(cfg.channels, from, rng);
    s = State{next_remaining(s.v, step.served), pack_bits(to.occupancy), pack_bits(to.quality),
              a.n};
  }
  traj.terminal_state = s;
  traj.terminal_penalty = cfg.penalty.value(s.v);
  traj.total_cost = total + traj.terminal_penalty;
  return traj;
}

MonteCarloStats monte_carlo(const ScenarioConfig& cfg, const PolicyHandle& policy, long n,
                            std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("rollout count must be >= 1");
  MonteCarloStats stats;
  stats.n = n;
  // Welford running moments: numerically stable and single-pass.
  double mean = 0.0;
  double m2 = 0.0;
  for (long i = 0; i < n; ++i) {
    std::mt19937_64 rng = make_stream(master_seed, static_cast<std::uint64_t>(i));
    double x = rollout(cfg, policy, rng).total_cost;
    double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  stats.mean = mean;
  stats.std_err = n > 1 ? std::sqrt(m2 / (static_cast<double>(n - 1) * static_cast<double>(n)))
                        : 0.0;
  return stats;
}

namespace {

SweepResult run_sweep(const ScenarioConfig& base, const std::vector<int>& grid, long rollouts,
                      std::uint64_t seed, bool vary_data_size) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("sweep grid must be strictly ascending");
    }
  }
  if (rollouts < 0) throw std::invalid_argument("rollout count must be >= 0");
  SweepResult result;
  result.var_name = vary_data_size ? "V" : "D";
  for (size_t gi = 0; gi < grid.size(); ++gi) {
    ScenarioConfig cfg = base;
    if (vary_data_size) {
      cfg.V = grid[gi];
      cfg.initial.v = -1;  // initial data tracks the grid value
      if (cfg.penalty.kind == PenaltySpec::Kind::Table) {
        if (static_cast<int>(cfg.penalty.table.size()) < cfg.V + 1) {
          throw std::invalid_argument("penalty table too short for data size " +
                                      std::to_string(cfg.V));
        }
        cfg.penalty.table.resize(static_cast<size_t>(cfg.V + 1));
      }
    } else {
      cfg.D = grid[gi];
    }
    ValidationReport validation = validate_config(cfg);
    if (!validation.ok()) {
      throw std::invalid_argument("sweep point " + std::to_string(grid[gi]) +
                                  " yields an invalid instance: " + validation.summary());
    }

    SolveResult solved = backward_induction(cfg);
    State s1 = cfg.initial_state();

    PolicyHandle handles[3] = {optimal_from_table(solved.policy), always_staying(cfg),
                               quality_switching(cfg)};
    double exact[3];
    exact[0] = expected_total_cost(solved.values, s1);
    exact[1] = expected_total_cost(evaluate_policy(cfg, handles[1].act), s1);
    exact[2] = expected_total_cost(evaluate_policy(cfg, handles[2].act), s1);

    // One master stream per grid point, shared by all policies: channel
    // evolution is action-independent, so this gives common random numbers
    // across policies.
    std::uint64_t point_master = substream_seed(seed, static_cast<std::uint64_t>(gi));

    for (int pi = 0; pi < 3; ++pi) {
      SweepRow row;
      row.sweep_var = grid[gi];
      row.policy = handles[pi].name;
      row.exact_value = exact[pi];
      row.n = rollouts;
      if (rollouts > 0) {
        MonteCarloStats stats = monte_carlo(cfg, handles[pi], rollouts, point_master);
        row.mean = stats.mean;
        row.std_err = stats.std_err;
      } else {
        row.mean = std::numeric_limits<double>::quiet_NaN();
        row.std_err = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace

SweepResult sweep_data_size(const ScenarioConfig& base, const std::vector<int>& grid,
                            long rollouts, std::uint64_t seed) {
  return run_sweep(base, grid, rollouts, seed, true);
}

SweepResult sweep_deadline(const ScenarioConfig& base, const std::vector<int>& grid, long rollouts,
                           std::uint64_t seed) {
  return run_sweep(base, grid, rollouts, seed, false);
}

int action_code(const State& s, const Action& a) {
  if (a.b == 0) return a.n == s.c ? 0 : 3;
  return a.n == s.c ? 1 : 2;
}

std::vector<SurfaceCell> dump_action_surface(const PolicyTable& policy, const ScenarioConfig& cfg,
                                             unsigned o, unsigned q, int c) {
  StateSpace space = policy.space;
  long joint = joint_index(o, q, cfg.M);
  std::vector<SurfaceCell> cells;
  cells.reserve(static_cast<size_t>(policy.D) * static_cast<size_t>(space.V + 1));
  for (int t = 1; t <= policy.D; ++t) {
    for (int v = 0; v <= space.V; ++v) {
      State s{v, o, q, c};
      Action a = policy.at(t, space.index(v, joint, c));
      SurfaceCell cell;
      cell.t = t;
      cell.v = v;
      cell.code = action_code(s, a);
      cell.target = (cell.code == 2 || cell.code == 3) ? a.n : 0;
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace osa
