#include "osa/checks.hpp"
#include "osa/config_io.hpp"
#include "osa/monotone.hpp"
#include "osa/policies.hpp"
#include "osa/sim.hpp"
#include "osa/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace osa;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void finish_run(const std::string& subcommand, const std::string& config_path,
                const ScenarioConfig& cfg, std::uint64_t seed,
                const std::vector<std::string>& outputs, const std::string& out_dir,
                Clock::time_point start) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.config_path = config_path;
  manifest.config_hash = config_hash_hex(cfg);
  manifest.seed = seed;
  manifest.tool_version = kToolVersion;
  manifest.wall_ms = elapsed_ms(start);
  manifest.outputs = outputs;
  write_manifest(manifest, join_path(out_dir, "manifest.json"));
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> grid;
  if (text.find(':') != std::string::npos) {
    int a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || in.rdbuf()->in_avail() > 0) {
      throw std::runtime_error("grid '" + text + "' is not of the form first:last:step");
    }
    if (step <= 0 || b < a) throw std::runtime_error("grid '" + text + "' must ascend");
    for (int v = a; v <= b; v += step) grid.push_back(v);
  } else {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
      if (part.empty()) throw std::runtime_error("grid '" + text + "' has an empty entry");
      grid.push_back(std::stoi(part));
    }
  }
  if (grid.empty()) throw std::runtime_error("grid '" + text + "' is empty");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw std::runtime_error("grid values must strictly ascend");
  }
  return grid;
}

int run_solve(const std::string& config_path, const std::string& out_dir, bool monotone,
              int zeta_override) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  if (zeta_override > 0) cfg.zeta = zeta_override;
  fs::create_directories(out_dir);

  std::vector<std::string> outputs;
  double cost_at_initial = 0.0;
  if (monotone) {
    MonotoneResult result = monotone_backward_induction(cfg);
    write_value_table_csv(result.values, join_path(out_dir, "values.csv"));
    write_value_table_json(result.values, join_path(out_dir, "values.json"));
    write_policy_csv(result.policy, join_path(out_dir, "policy.csv"));
    write_policy_json(result.policy, join_path(out_dir, "policy.json"));
    write_thresholds_csv(result.thresholds, join_path(out_dir, "thresholds.csv"));
    write_thresholds_json(result.thresholds, join_path(out_dir, "thresholds.json"));
    outputs = {"values.csv", "values.json", "policy.csv",
               "policy.json", "thresholds.csv", "thresholds.json"};
    cost_at_initial = expected_total_cost(result.values, cfg.initial_state());
  } else {
    SolveResult result = backward_induction(cfg);
    write_value_table_csv(result.values, join_path(out_dir, "values.csv"));
    write_value_table_json(result.values, join_path(out_dir, "values.json"));
    write_policy_csv(result.policy, join_path(out_dir, "policy.csv"));
    write_policy_json(result.policy, join_path(out_dir, "policy.json"));
    outputs = {"values.csv", "values.json", "policy.csv", "policy.json"};
    cost_at_initial = expected_total_cost(result.values, cfg.initial_state());
  }
  finish_run(monotone ? "solve-monotone" : "solve", config_path, cfg, 0, outputs, out_dir, start);
  std::cout << (monotone ? "solve-monotone" : "solve") << ": states=" << state_space(cfg).size()
            << " stages=" << cfg.D << " cost_at_initial=" << fmt_double(cost_at_initial) << "\n";
  return 0;
}

int run_thresholds(const std::string& config_path, const std::string& out_dir,
                   int zeta_override) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  if (zeta_override > 0) cfg.zeta = zeta_override;
  fs::create_directories(out_dir);
  MonotoneResult result = monotone_backward_induction(cfg);
  write_thresholds_csv(result.thresholds, join_path(out_dir, "thresholds.csv"));
  write_thresholds_json(result.thresholds, join_path(out_dir, "thresholds.json"));
  finish_run("thresholds", config_path, cfg, 0, {"thresholds.csv", "thresholds.json"}, out_dir,
             start);
  std::cout << "thresholds: stages=" << cfg.D << " columns=" << state_space(cfg).K * cfg.M
            << "\n";
  return 0;
}

int run_check(const std::string& config_path, const std::string& out_dir) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  SolveResult solved = backward_induction(cfg);

  std::vector<CheckReport> reports;
  reports.push_back(check_value_monotone(solved.values));
  reports.push_back(check_subadditivity_all(cfg, solved.values));
  reports.push_back(check_policy_monotone(solved.policy, cfg));

  bool all_pass = true;
  for (const CheckReport& report : reports) {
    all_pass = all_pass && report.pass;
    std::cout << report.summary() << "\n";
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_check_reports_json(reports, join_path(out_dir, "checks.json"));
    finish_run("check", config_path, cfg, 0, {"checks.json"}, out_dir, start);
  }
  std::cout << "RESULT: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? 0 : 2;
}

PolicyHandle handle_by_name(const std::string& raw, const ScenarioConfig& cfg,
                            const SolveResult& solved) {
  std::string name = raw;
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "optimal") return optimal_from_table(solved.policy);
  if (name == "always_staying") return always_staying(cfg);
  if (name == "quality_switching") return quality_switching(cfg);
  throw std::runtime_error("unknown policy '" + raw +
                           "' (expected optimal, always-staying, or quality-switching)");
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& policy_name, long rollouts, std::uint64_t seed) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  if (rollouts < 1) throw std::runtime_error("--rollouts must be >= 1");
  fs::create_directories(out_dir);

  SolveResult solved = backward_induction(cfg);
  PolicyHandle policy = handle_by_name(policy_name, cfg, solved);
  State s1 = cfg.initial_state();
  double exact = policy.name == "optimal"
                     ? expected_total_cost(solved.values, s1)
                     : expected_total_cost(evaluate_policy(cfg, policy.act), s1);
  MonteCarloStats stats = monte_carlo(cfg, policy, rollouts, seed);

  {
    std::ofstream out(join_path(out_dir, "simulate.csv"), std::ios::binary);
    out << "policy,mean,stderr,exact_value,n\n";
    out << csv_quote(policy.name) << ',' << fmt_double(stats.mean) << ','
        << fmt_double(stats.std_err) << ',' << fmt_double(exact) << ',' << stats.n << '\n';
  }
  {
    std::ofstream out(join_path(out_dir, "simulate.json"), std::ios::binary);
    out << "{\"columns\":[\"policy\",\"mean\",\"stderr\",\"exact_value\",\"n\"],\"rows\":[\n[\""
        << policy.name << "\"," << fmt_double(stats.mean) << ',' << fmt_double(stats.std_err)
        << ',' << fmt_double(exact) << ',' << stats.n << "]\n]}\n";
  }
  finish_run("simulate", config_path, cfg, seed, {"simulate.csv", "simulate.json"}, out_dir,
             start);
  std::cout << "simulate: policy=" << policy.name << " mean=" << fmt_double(stats.mean)
            << " stderr=" << fmt_double(stats.std_err) << " exact=" << fmt_double(exact)
            << " n=" << stats.n << "\n";
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir, const std::string& var,
              const std::string& grid_text, long rollouts, std::uint64_t seed) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  if (var != "V" && var != "D") throw std::runtime_error("--var must be V or D");
  if (rollouts < 0) throw std::runtime_error("--rollouts must be >= 0");
  std::vector<int> grid = parse_grid(grid_text);
  fs::create_directories(out_dir);

  SweepResult result = var == "V" ? sweep_data_size(cfg, grid, rollouts, seed)
                                  : sweep_deadline(cfg, grid, rollouts, seed);
  write_sweep_csv(result, join_path(out_dir, "sweep.csv"));
  write_sweep_json(result, join_path(out_dir, "sweep.json"));
  finish_run("sweep", config_path, cfg, seed, {"sweep.csv", "sweep.json"}, out_dir, start);
  std::cout << "sweep: var=" << var << " points=" << grid.size() << " rows=" << result.rows.size()
            << "\n";
  return 0;
}

int run_surface(const std::string& config_path, const std::string& out_dir,
                const std::string& o_bits, const std::string& q_bits, int channel) {
  Clock::time_point start = Clock::now();
  ScenarioConfig cfg = parse_config(config_path);
  fs::create_directories(out_dir);

  State s1 = cfg.initial_state();
  unsigned o = s1.o;
  unsigned q = s1.q;
  int c = s1.c;
  if (!o_bits.empty()) {
    if (static_cast<int>(o_bits.size()) != cfg.M) {
      throw std::runtime_error("--occupancy must have exactly " + std::to_string(cfg.M) +
                               " bits");
    }
    o = bits_to_mask(o_bits);
  }
  if (!q_bits.empty()) {
    if (static_cast<int>(q_bits.size()) != cfg.M) {
      throw std::runtime_error("--quality must have exactly " + std::to_string(cfg.M) + " bits");
    }
    q = bits_to_mask(q_bits);
  }
  if (channel > 0) {
    if (channel > cfg.M) throw std::runtime_error("--channel outside 1.." + std::to_string(cfg.M));
    c = channel;
  }

  SolveResult solved = backward_induction(cfg);
  std::vector<SurfaceCell> cells = dump_action_surface(solved.policy, cfg, o, q, c);
  write_surface_csv(cells, join_path(out_dir, "surface.csv"));
  write_surface_json(cells, join_path(out_dir, "surface.json"));
  finish_run("action-surface", config_path, cfg, 0, {"surface.csv", "surface.json"}, out_dir,
             start);
  std::cout << "action-surface: o=" << mask_to_bits(o, cfg.M) << " q=" << mask_to_bits(q, cfg.M)
            << " c=" << c << " cells=" << cells.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-constrained opportunistic spectrum access: exact and threshold-form "
               "solvers, structural checks, and simulation"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::string policy_name = "optimal";
  std::string var, grid_text;
  std::string o_bits, q_bits;
  int channel = 0;
  int zeta_override = 0;
  long rollouts_sim = 10000;
  long rollouts_sweep = 1000;
  std::uint64_t seed = 12345;

  CLI::App* solve = app.add_subcommand("solve", "Exact backward induction; writes value and "
                                                "policy tables");
  solve->add_option("--config", config_path, "Scenario JSON file")->required();
  solve->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* solve_mono = app.add_subcommand(
      "solve-monotone", "Threshold-structure solver; also writes threshold tables");
  solve_mono->add_option("--config", config_path, "Scenario JSON file")->required();
  solve_mono->add_option("--out", out_dir, "Output directory")->required();
  solve_mono->add_option("--zeta", zeta_override, "Override the scan stride (>= 1)");

  CLI::App* thresholds = app.add_subcommand("thresholds", "Threshold tables only");
  thresholds->add_option("--config", config_path, "Scenario JSON file")->required();
  thresholds->add_option("--out", out_dir, "Output directory")->required();
  thresholds->add_option("--zeta", zeta_override, "Override the scan stride (>= 1)");

  CLI::App* check = app.add_subcommand(
      "check", "Solve and verify structural properties; exit 2 when any check fails");
  check->add_option("--config", config_path, "Scenario JSON file")->required();
  check->add_option("--out", out_dir, "Optional output directory for checks.json");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo rollout of a policy");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--policy", policy_name,
                       "optimal | always-staying | quality-switching (default optimal)");
  simulate->add_option("--rollouts", rollouts_sim, "Number of rollouts (default 10000)");
  simulate->add_option("--seed", seed, "Master seed (default 12345)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Re-solve across a grid of data sizes (--var V) or deadlines (--var D)");
  sweep->add_option("--config", config_path, "Scenario JSON file")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--var", var, "Swept variable: V or D")->required();
  sweep->add_option("--grid", grid_text, "first:last:step or comma list")->required();
  sweep->add_option("--rollouts", rollouts_sweep, "Rollouts per point, 0 = exact only (default 1000)");
  sweep->add_option("--seed", seed, "Master seed (default 12345)");

  CLI::App* surface = app.add_subcommand(
      "action-surface", "Dump the (stage, remaining-data) action grid of one channel column");
  surface->add_option("--config", config_path, "Scenario JSON file")->required();
  surface->add_option("--out", out_dir, "Output directory")->required();
  surface->add_option("--occupancy", o_bits, "Occupancy bits, channel 1 first (default: initial)");
  surface->add_option("--quality", q_bits, "Quality bits, channel 1 first (default: initial)");
  surface->add_option("--channel", channel, "Tuned channel (default: initial)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems exit 1; help/version exit 0
  }

  try {
    if (solve->parsed()) return run_solve(config_path, out_dir, false, 0);
    if (solve_mono->parsed()) return run_solve(config_path, out_dir, true, zeta_override);
    if (thresholds->parsed()) return run_thresholds(config_path, out_dir, zeta_override);
    if (check->parsed()) return run_check(config_path, out_dir);
    if (simulate->parsed()) {
      return run_simulate(config_path, out_dir, policy_name, rollouts_sim, seed);
    }
    if (sweep->parsed()) return run_sweep(config_path, out_dir, var, grid_text, rollouts_sweep, seed);
    if (surface->parsed()) return run_surface(config_path, out_dir, o_bits, q_bits, channel);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
