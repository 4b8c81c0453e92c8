#include "osa/checks.hpp"

#include <sstream>
#include <stdexcept>

namespace osa {

namespace {

int action_rate(const ScenarioConfig& cfg, unsigned o, unsigned q, const Action& a) {
  if (a.b != 1) return 0;
  if (((o >> (a.n - 1)) & 1u) == 0) return 0;
  return ((q >> (a.n - 1)) & 1u) ? cfg.rates.good : cfg.rates.bad;
}

void record(CheckReport& report, std::size_t cap, const Counterexample& ce) {
  report.pass = false;
  ++report.violations;
  if (report.counterexamples.size() < cap) report.counterexamples.push_back(ce);
}

}  // namespace

std::string CheckReport::summary() const {
  std::ostringstream out;
  out << name << ": " << (pass ? "PASS" : "FAIL") << " (" << checked << " comparisons";
  if (!pass) {
    out << ", " << violations << " violations";
    if (!counterexamples.empty()) {
      const Counterexample& ce = counterexamples.front();
      out << "; first at t=" << ce.t << " s=" << to_string(ce.s) << " " << ce.detail;
    }
  }
  out << ")";
  return out.str();
}

RateOrder action_rate_order(const ScenarioConfig& cfg, unsigned o, unsigned q, const Action& a1,
                            const Action& a2) {
  int r1 = action_rate(cfg, o, q, a1);
  int r2 = action_rate(cfg, o, q, a2);
  if (r1 == r2) return RateOrder::Both;
  return r1 > r2 ? RateOrder::FirstGeq : RateOrder::SecondGeq;
}

CheckReport check_value_monotone(const ValueTable& values, double tol,
                                 std::size_t max_counterexamples) {
  CheckReport report;
  report.name = "value-monotone-in-remaining-data";
  const StateSpace& space = values.space;
  for (int t = 1; t <= values.D + 1; ++t) {
    const Eigen::VectorXd& layer = values.layer(t);
    for (long joint = 0; joint < space.K; ++joint) {
      unsigned o = joint_o_mask(joint, space.M);
      unsigned q = joint_q_mask(joint, space.M);
      for (int c = 1; c <= space.M; ++c) {
        for (int v = 0; v < space.V; ++v) {
          double lo = layer[space.index(v, joint, c)];
          double hi = layer[space.index(v + 1, joint, c)];
          ++report.checked;
          if (hi < lo - tol) {
            Counterexample ce;
            ce.t = t;
            ce.s = State{v, o, q, c};
            ce.v_hi = v + 1;
            ce.v_lo = v;
            ce.lhs = hi;
            ce.rhs = lo;
            std::ostringstream detail;
            detail << "U(v=" << (v + 1) << ") = " << hi << " < U(v=" << v << ") = " << lo
                   << " - tol";
            ce.detail = detail.str();
            record(report, max_counterexamples, ce);
          }
        }
      }
    }
  }
  return report;
}

CheckReport check_subadditivity(const ScenarioConfig& cfg, const ValueTable& values, int t,
                                double tol, std::size_t max_counterexamples) {
  if (t < 1 || t > values.D) {
    throw std::out_of_range("stage " + std::to_string(t) + " outside 1.." +
                            std::to_string(values.D));
  }
  CheckReport report;
  report.name = "q-gap-nonincreasing(t=" + std::to_string(t) + ")";
  StateSpace space = values.space;
  Eigen::MatrixXd kernel = joint_kernel(cfg.channels);
  StageKernel sk = build_stage_kernel(kernel, values.layer(t + 1), space);

  for (long joint = 0; joint < space.K; ++joint) {
    unsigned o = joint_o_mask(joint, space.M);
    unsigned q = joint_q_mask(joint, space.M);
    for (int c = 1; c <= space.M; ++c) {
      // Admissible actions are constant across v >= 1.
      State probe{1, o, q, c};
      std::vector<Action> actions = allowed_actions(cfg, probe);
      if (space.V < 2) continue;

      // Q(v, a) for v = 1..V.
      std::vector<std::vector<double>> qv(actions.size(),
                                          std::vector<double>(static_cast<size_t>(space.V + 1)));
      for (size_t ai = 0; ai < actions.size(); ++ai) {
        const Action& a = actions[ai];
        double cost = stage_cost_value(cfg.costs, true, a.b, a.n != c);
        int rate = action_rate(cfg, o, q, a);
        for (int v = 1; v <= space.V; ++v) {
          qv[ai][static_cast<size_t>(v)] = cost + sk.at(a.n, joint, next_remaining(v, rate));
        }
      }

      for (size_t hi = 0; hi < actions.size(); ++hi) {
        for (size_t lo = 0; lo < actions.size(); ++lo) {
          if (hi == lo) continue;
          if (action_rate(cfg, o, q, actions[hi]) <= action_rate(cfg, o, q, actions[lo])) {
            continue;  // only strictly rate-ordered pairs
          }
          for (int v = 1; v < space.V; ++v) {
            double g_lo = qv[hi][static_cast<size_t>(v)] - qv[lo][static_cast<size_t>(v)];
            double g_hi = qv[hi][static_cast<size_t>(v + 1)] - qv[lo][static_cast<size_t>(v + 1)];
            ++report.checked;
            if (g_hi > g_lo + tol) {
              Counterexample ce;
              ce.t = t;
              ce.s = State{v, o, q, c};
              ce.a1 = actions[hi];
              ce.a2 = actions[lo];
              ce.v_hi = v + 1;
              ce.v_lo = v;
              ce.lhs = qv[hi][static_cast<size_t>(v + 1)] + qv[lo][static_cast<size_t>(v)];
              ce.rhs = qv[lo][static_cast<size_t>(v + 1)] + qv[hi][static_cast<size_t>(v)];
              std::ostringstream detail;
              detail << "gap Q(v," << to_string(actions[hi]) << ") - Q(v," << to_string(actions[lo])
                     << ") rises from " << g_lo << " to " << g_hi << " between v=" << v
                     << " and v=" << (v + 1);
              ce.detail = detail.str();
              record(report, max_counterexamples, ce);
            }
          }
        }
      }
    }
  }
  return report;
}

CheckReport check_subadditivity_all(const ScenarioConfig& cfg, const ValueTable& values,
                                    double tol, std::size_t max_counterexamples) {
  CheckReport merged;
  merged.name = "q-gap-nonincreasing(all stages)";
  for (int t = 1; t <= values.D; ++t) {
    CheckReport part = check_subadditivity(cfg, values, t, tol, max_counterexamples);
    merged.checked += part.checked;
    merged.violations += part.violations;
    merged.pass = merged.pass && part.pass;
    for (const Counterexample& ce : part.counterexamples) {
      if (merged.counterexamples.size() < max_counterexamples) {
        merged.counterexamples.push_back(ce);
      }
    }
  }
  return merged;
}

CheckReport check_policy_monotone(const PolicyTable& policy, const ScenarioConfig& cfg,
                                  std::size_t max_counterexamples) {
  CheckReport report;
  report.name = "policy-threshold-ladder";
  const StateSpace& space = policy.space;

  for (int t = 1; t <= policy.D; ++t) {
    for (long joint = 0; joint < space.K; ++joint) {
      unsigned o = joint_o_mask(joint, space.M);
      unsigned q = joint_q_mask(joint, space.M);
      for (int c = 1; c <= space.M; ++c) {
        CaseTag tag = classify_case(o, q, c, space.M);
        Action prev = policy.at(t, space.index(0, joint, c));
        ++report.checked;
        if (!(prev.b == 0 && prev.n == c)) {
          Counterexample ce;
          ce.t = t;
          ce.s = State{0, o, q, c};
          ce.a1 = prev;
          ce.detail = "column must start silent-stay at v=0, got " + to_string(prev);
          record(report, max_counterexamples, ce);
        }
        int changes = 0;
        for (int v = 1; v <= space.V; ++v) {
          Action cur = policy.at(t, space.index(v, joint, c));
          ++report.checked;
          int r_prev = action_rate(cfg, o, q, prev);
          int r_cur = action_rate(cfg, o, q, cur);
          auto fail = [&](const std::string& why) {
            Counterexample ce;
            ce.t = t;
            ce.s = State{v - 1, o, q, c};
            ce.a1 = prev;
            ce.a2 = cur;
            ce.v_lo = v - 1;
            ce.v_hi = v;
            ce.lhs = static_cast<double>(r_cur);
            ce.rhs = static_cast<double>(r_prev);
            ce.detail = why;
            record(report, max_counterexamples, ce);
          };
          if (r_cur < r_prev) {
            fail("served rate drops from " + std::to_string(r_prev) + " to " +
                 std::to_string(r_cur) + " as v grows");
          }
          if (!(cur == prev)) {
            ++changes;
            bool ok = false;
            switch (tag) {
              case CaseTag::Case1:
                ok = changes <= 1 && prev.b == 0 && prev.n == c && cur.b == 1 && cur.n == c;
                break;
              case CaseTag::Case2:
                ok = changes <= 1 && prev.b == 0 && prev.n == c && cur.b == 1 && cur.n != c;
                break;
              case CaseTag::Case3:
                ok = changes <= 2 && cur.b == 1 &&
                     ((prev.b == 0 && prev.n == c) || (prev.b == 1 && prev.n == c && cur.n != c));
                break;
              case CaseTag::Case4:
                ok = false;  // Case4 columns must stay silent throughout
                break;
              case CaseTag::Other:
                ok = false;
                break;
            }
            if (!ok) {
              fail("rung change " + to_string(prev) + " -> " + to_string(cur) +
                   " breaks the case-" + std::to_string(static_cast<int>(tag)) + " ladder");
            }
          }
          prev = cur;
        }
      }
    }
  }
  return report;
}

}  // namespace osa
