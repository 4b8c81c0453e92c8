#include "osa/mdp.hpp"

#include "osa/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace osa;

namespace {

ScenarioConfig m1_idle_good(int V, int D, double L) {
  ScenarioConfig cfg;
  cfg.M = 1;
  cfg.V = V;
  cfg.D = D;
  cfg.channels = {testutil::bench_channel()};
  cfg.rates = {2, 1};
  cfg.costs = {0.01, 40.0, 5.0};
  cfg.penalty.kind = PenaltySpec::Kind::Quadratic;
  cfg.penalty.L = L;
  cfg.initial.v = V;
  cfg.initial.occupancy = {1};
  cfg.initial.quality = {1};
  cfg.initial.channel = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("mdp") {

TEST_CASE("state enumeration size and axis order") {
  StateSpace space(3, 30);
  CHECK(space.size() == 5952);  // 31 * 64 * 3
  CHECK(space.index(0, 0, 1) == 0);
  CHECK(space.index(0, 0, 2) == 1);   // channel is the fastest axis
  CHECK(space.index(0, 1, 1) == 3);   // then the joint channel index
  CHECK(space.index(1, 0, 1) == 192); // remaining data is the slowest
  State s = space.decode(0);
  CHECK(s == State{0, 0, 0, 1});
}

TEST_CASE("index and decode are inverse bijections") {
  StateSpace space(3, 7);
  for (long idx = 0; idx < space.size(); ++idx) {
    State s = space.decode(idx);
    CHECK(space.index(s) == idx);
    CHECK(s.v >= 0);
    CHECK(s.v <= 7);
    CHECK(s.c >= 1);
    CHECK(s.c <= 3);
    CHECK(s.o < 8u);
    CHECK(s.q < 8u);
  }
  CHECK_THROWS_AS(space.decode(space.size()), std::out_of_range);
}

TEST_CASE("admissible actions follow the canonical order") {
  ScenarioConfig cfg = testutil::bench_m3_config();

  SUBCASE("silences first, then transmissions sorted by quality, distance, index") {
    State s{5, 0b111u, 0b010u, 3};
    std::vector<Action> acts = allowed_actions(cfg, s);
    REQUIRE(acts.size() == 6);
    CHECK(acts[0] == Action{0, 3});
    CHECK(acts[1] == Action{0, 1});
    CHECK(acts[2] == Action{0, 2});
    CHECK(acts[3] == Action{1, 2});  // only good idle channel
    CHECK(acts[4] == Action{1, 3});  // bad, distance 0
    CHECK(acts[5] == Action{1, 1});  // bad, distance 2
  }

  SUBCASE("no data means no transmissions") {
    State s{0, 0b111u, 0b111u, 2};
    std::vector<Action> acts = allowed_actions(cfg, s);
    REQUIRE(acts.size() == 3);
    CHECK(acts[0] == Action{0, 2});
    CHECK(acts[1] == Action{0, 1});
    CHECK(acts[2] == Action{0, 3});
  }

  SUBCASE("busy channels are never transmission targets") {
    State s{9, 0b010u, 0b111u, 1};
    std::vector<Action> acts = allowed_actions(cfg, s);
    REQUIRE(acts.size() == 4);
    CHECK(acts[3] == Action{1, 2});
  }

  SUBCASE("all-busy leaves only silences") {
    State s{9, 0u, 0b101u, 2};
    std::vector<Action> acts = allowed_actions(cfg, s);
    CHECK(acts.size() == 3);
    for (const Action& a : acts) CHECK(a.b == 0);
  }
}

TEST_CASE("admissibility predicate matches the enumeration") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  std::mt19937_64 g = make_stream(11, 0);
  StateSpace space = state_space(cfg);
  for (int trial = 0; trial < 200; ++trial) {
    State s = space.decode(static_cast<long>(g() % static_cast<std::uint64_t>(space.size())));
    std::vector<Action> acts = allowed_actions(cfg, s);
    for (int b = 0; b <= 1; ++b) {
      for (int n = 1; n <= cfg.M; ++n) {
        Action a{b, n};
        bool listed = false;
        for (const Action& x : acts) listed = listed || x == a;
        CHECK(is_allowed(cfg, s, a) == listed);
      }
    }
  }
}

TEST_CASE("transmission rate depends on the target's occupancy and quality") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  State s{10, 0b011u, 0b010u, 1};
  CHECK(transmission_rate(cfg, s, Action{1, 2}) == 2);  // idle good
  CHECK(transmission_rate(cfg, s, Action{1, 1}) == 1);  // idle bad
  CHECK(transmission_rate(cfg, s, Action{1, 3}) == 0);  // busy target
  CHECK(transmission_rate(cfg, s, Action{0, 2}) == 0);  // silent
}

TEST_CASE("stage costs cover all six cases") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  State with_data{4, 0b111u, 0b010u, 3};
  CHECK(stage_cost(cfg, with_data, Action{1, 3}) == doctest::Approx(40.0));
  CHECK(stage_cost(cfg, with_data, Action{1, 2}) == doctest::Approx(45.0));
  CHECK(stage_cost(cfg, with_data, Action{0, 3}) == doctest::Approx(0.01));
  CHECK(stage_cost(cfg, with_data, Action{0, 1}) == doctest::Approx(5.01));
  State drained{0, 0b111u, 0b010u, 3};
  CHECK(stage_cost(cfg, drained, Action{0, 3}) == doctest::Approx(0.0));
  CHECK(stage_cost(cfg, drained, Action{0, 2}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(stage_cost(cfg, drained, Action{1, 3}), std::invalid_argument);
  State busy{4, 0u, 0u, 1};
  CHECK_THROWS_AS(stage_cost(cfg, busy, Action{1, 1}), std::invalid_argument);
}

TEST_CASE("stage cost does not depend on how much data remains, only whether any does") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  State a{1, 0b101u, 0b100u, 2};
  State b{27, 0b101u, 0b100u, 2};
  for (const Action& act : allowed_actions(cfg, a)) {
    CHECK(stage_cost(cfg, a, act) == stage_cost(cfg, b, act));
  }
}

TEST_CASE("remaining data clamps at zero") {
  CHECK(next_remaining(5, 2) == 3);
  CHECK(next_remaining(1, 2) == 0);
  CHECK(next_remaining(0, 0) == 0);
  CHECK(next_remaining(2, 2) == 0);
}

TEST_CASE("quadratic and tabular penalties") {
  PenaltySpec quad;
  quad.kind = PenaltySpec::Kind::Quadratic;
  quad.L = 5.0;
  CHECK(quad.value(0) == 0.0);
  CHECK(quad.value(50) == doctest::Approx(12500.0));
  PenaltySpec table;
  table.kind = PenaltySpec::Kind::Table;
  table.table = {0.0, 1.0, 4.0, 9.0};
  CHECK(table.value(2) == 4.0);
  CHECK_THROWS_AS(table.value(4), std::out_of_range);
  CHECK_THROWS_AS(table.value(-1), std::out_of_range);
}

TEST_CASE("successor distribution: ascending joint order, mass one, deterministic retune") {
  ScenarioConfig cfg = m1_idle_good(5, 1, 5.0);
  State s{5, 1u, 0u, 1};

  SUBCASE("silent successors keep v") {
    auto succ = successor_distribution(cfg, s, Action{0, 1});
    REQUIRE(succ.size() == 4);
    double probs[4] = {0.4, 0.4, 0.1, 0.1};
    long expected_joint = 0;
    double mass = 0.0;
    for (size_t i = 0; i < succ.size(); ++i) {
      const auto& [next, p] = succ[i];
      CHECK(joint_index(next.o, next.q, 1) == expected_joint++);
      CHECK(p == doctest::Approx(probs[i]));
      CHECK(next.v == 5);
      CHECK(next.c == 1);
      mass += p;
    }
    CHECK(mass == doctest::Approx(1.0));
  }

  SUBCASE("transmitting on an idle bad channel serves the bad rate") {
    auto succ = successor_distribution(cfg, s, Action{1, 1});
    for (const auto& [next, p] : succ) {
      CHECK(next.v == 4);  // rate 1
      CHECK(p > 0.0);
    }
  }

  SUBCASE("frozen chains yield a single successor") {
    ScenarioConfig frozen = testutil::frozen_m1_config();
    State fs{3, 1u, 1u, 1};
    auto succ = successor_distribution(frozen, fs, Action{1, 1});
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].second == 1.0);
    CHECK(succ[0].first == State{1, 1u, 1u, 1});
  }

  SUBCASE("inadmissible actions are rejected") {
    State busy{5, 0u, 0u, 1};
    CHECK_THROWS_AS(successor_distribution(cfg, busy, Action{1, 1}), std::invalid_argument);
  }
}

TEST_CASE("successor probabilities match the joint kernel row") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  Eigen::MatrixXd kernel = joint_kernel(cfg.channels);
  State s{12, 0b110u, 0b011u, 2};
  long from = joint_index(s.o, s.q, 3);
  auto succ = successor_distribution(cfg, s, Action{0, 2});
  double mass = 0.0;
  for (const auto& [next, p] : succ) {
    CHECK(p == kernel(from, joint_index(next.o, next.q, 3)));
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("config validation catches structural mistakes") {
  ScenarioConfig good = testutil::bench_m3_config();
  CHECK(validate_config(good).ok());

  SUBCASE("zeta") {
    ScenarioConfig bad = good;
    bad.zeta = 0;
    CHECK_FALSE(validate_config(bad).ok());
  }
  SUBCASE("channel count") {
    ScenarioConfig bad = good;
    bad.channels.pop_back();
    CHECK_FALSE(validate_config(bad).ok());
  }
  SUBCASE("rates ordering") {
    ScenarioConfig bad = good;
    bad.rates = {1, 2};
    CHECK_FALSE(validate_config(bad).ok());
  }
  SUBCASE("negative cost") {
    ScenarioConfig bad = good;
    bad.costs.sw = -1.0;
    CHECK_FALSE(validate_config(bad).ok());
  }
  SUBCASE("penalty table size") {
    ScenarioConfig bad = good;
    bad.penalty.kind = PenaltySpec::Kind::Table;
    bad.penalty.table = {0.0, 1.0};
    CHECK_FALSE(validate_config(bad).ok());
  }
  SUBCASE("penalty table must start at zero, be nondecreasing and convex") {
    ScenarioConfig bad = good;
    bad.V = 2;
    bad.initial.v = 2;
    bad.penalty.kind = PenaltySpec::Kind::Table;
    bad.penalty.table = {1.0, 2.0, 3.0};
    CHECK_FALSE(validate_config(bad).ok());
    bad.penalty.table = {0.0, 5.0, 4.0};
    CHECK_FALSE(validate_config(bad).ok());
    ScenarioConfig concave = good;
    concave.V = 3;
    concave.initial.v = 3;
    concave.penalty.kind = PenaltySpec::Kind::Table;
    concave.penalty.table = {0.0, 5.0, 8.0, 9.0};  // increments 5, 3, 1
    CHECK_FALSE(validate_config(concave).ok());
    ScenarioConfig ok = good;
    ok.V = 3;
    ok.initial.v = 3;
    ok.penalty.kind = PenaltySpec::Kind::Table;
    ok.penalty.table = {0.0, 5.0, 20.0, 45.0};
    CHECK(validate_config(ok).ok());
  }
  SUBCASE("initial state bounds") {
    ScenarioConfig bad = good;
    bad.initial.v = 31;
    CHECK_FALSE(validate_config(bad).ok());
    bad = good;
    bad.initial.channel = 4;
    CHECK_FALSE(validate_config(bad).ok());
    bad = good;
    bad.initial.occupancy = {1, 1};
    CHECK_FALSE(validate_config(bad).ok());
  }
}

TEST_CASE("initial state applies defaults") {
  ScenarioConfig cfg = testutil::bench_m3_config();
  cfg.initial.v = -1;
  cfg.initial.channel = 0;
  State s1 = cfg.initial_state();
  CHECK(s1.v == 30);
  CHECK(s1.c == 3);  // min(3, M)
  cfg.M = 2;
  cfg.channels.pop_back();
  cfg.initial.occupancy = {1, 0};
  cfg.initial.quality = {1, 0};
  State s2 = cfg.initial_state();
  CHECK(s2.c == 2);  // min(3, 2)
}

TEST_CASE("random instances are always valid") {
  std::mt19937_64 g = make_stream(3141, 0);
  for (int trial = 0; trial < 50; ++trial) {
    ScenarioConfig cfg = testutil::random_instance(g, 3, 25, 10);
    ValidationReport report = validate_config(cfg);
    INFO(report.summary());
    CHECK(report.ok());
  }
}

}  // TEST_SUITE
