#include "mdpsynth/approx_lp.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mdpsynth/discount.hpp"
#include "mdpsynth/exact_milp.hpp"

namespace mdpsynth {

namespace {

constexpr double kFlowTol = 1e-9;

std::string join_names(const Mdp& mdp, const std::vector<int>& states) {
  std::ostringstream out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out << ", ";
    out << mdp.state_names[states[i]];
  }
  return out.str();
}

struct FlowLp {
  LinearProgram lp;
  std::vector<int> base;  // variable offset per state, -1 off Sr
  std::vector<std::vector<double>> reward;
};

// Occupation-measure polytope of reach-maximizing policies: undiscounted
// balance on Sr plus the row pinning expected one-step target mass.
FlowLp build_flow_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                     const std::vector<std::vector<double>>& objective) {
  const StatePartition& part = analysis.partition;
  FlowLp out;
  out.base.assign(mdp.num_states(), -1);
  out.reward.resize(mdp.num_states());
  for (int s : part.rest) {
    out.base[s] = out.lp.num_vars();
    out.reward[s].assign(mdp.num_actions(s), 0.0);
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      out.lp.add_variable("l_" + mdp.state_names[s] + "_" +
                              mdp.actions[s][a].name,
                          objective[s][a]);
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        if (part.in_target[next]) out.reward[s][a] += p;
    }
  }
  for (int s : part.rest) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      coeffs.emplace_back(out.base[s] + a, 1.0);
    for (int sp : part.rest)
      for (int a = 0; a < mdp.num_actions(sp); ++a)
        for (const auto& [next, p] : mdp.actions[sp][a].transitions)
          if (next == s && p > 0.0)
            coeffs.emplace_back(out.base[sp] + a, -p);
    out.lp.add_row(LpRelation::kEq, s == mdp.initial ? 1.0 : 0.0,
                   std::move(coeffs), "bal_" + mdp.state_names[s]);
  }
  std::vector<std::pair<int, double>> reach;
  for (int s : part.rest)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (out.reward[s][a] > 0.0)
        reach.emplace_back(out.base[s] + a, out.reward[s][a]);
  out.lp.add_row(LpRelation::kEq, analysis.x[mdp.initial], std::move(reach),
                 "reach");
  return out;
}

OccupationLp run_flow_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                         FlowLp&& flow, const char* what) {
  const LpSolution sol = solve_lp(flow.lp);
  if (sol.status != LpStatus::kOptimal) {
    std::ostringstream msg;
    msg << what << ": occupation LP ended " << to_string(sol.status);
    throw std::runtime_error(msg.str());
  }
  OccupationLp out;
  out.value = sol.objective;
  out.lp_iterations = sol.iterations;
  out.lambda.resize(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    out.lambda[s].assign(mdp.num_actions(s), 0.0);
    if (flow.base[s] >= 0)
      for (int a = 0; a < mdp.num_actions(s); ++a)
        out.lambda[s][a] = std::max(0.0, sol.x[flow.base[s] + a]);
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> modified_costs(
    const Mdp& mdp, const StatePartition& part, bool zero_terminal_costs,
    std::vector<std::string>* diagnostics) {
  std::vector<int> offenders;
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (!part.in_target[s] && !part.in_zero[s]) continue;
    for (const auto& act : mdp.actions[s])
      if (act.cost != 0.0) {
        offenders.push_back(s);
        break;
      }
  }
  if (!offenders.empty()) {
    if (!zero_terminal_costs) {
      throw std::runtime_error(
          "modified_costs: nonzero costs on target or zero-probability "
          "states (" +
          join_names(mdp, offenders) +
          "); the surrogate requires them to be free, pass the zero-out "
          "option to proceed");
    }
    if (diagnostics)
      diagnostics->push_back("zeroed costs on terminal-class states: " +
                             join_names(mdp, offenders));
  }

  std::vector<int> unvisited;
  std::vector<std::vector<double>> ctilde(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    ctilde[s].assign(mdp.num_actions(s), 0.0);
    if (part.in_target[s] || part.in_zero[s]) continue;
    if (part.tmin[s] == StatePartition::kUnreachable) {
      unvisited.push_back(s);
      continue;
    }
    const double scale =
        std::pow(mdp.discount, static_cast<double>(part.tmin[s] - 1));
    for (int a = 0; a < mdp.num_actions(s); ++a)
      ctilde[s][a] = scale * mdp.actions[s][a].cost;
  }
  if (!unvisited.empty() && diagnostics)
    diagnostics->push_back(
        "states unreachable from the initial state keep zero surrogate "
        "cost: " +
        join_names(mdp, unvisited));
  return ctilde;
}

OccupationLp solve_surrogate_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& ctilde) {
  return run_flow_lp(mdp, analysis, build_flow_lp(mdp, analysis, ctilde),
                     "solve_surrogate_lp");
}

OccupationLp solve_selection_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& ctilde,
                                double vstar) {
  std::vector<std::vector<double>> ones(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s)
    ones[s].assign(mdp.num_actions(s), 1.0);
  FlowLp flow = build_flow_lp(mdp, analysis, ones);
  std::vector<std::pair<int, double>> coeffs;
  for (int s : analysis.partition.rest)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (ctilde[s][a] != 0.0)
        coeffs.emplace_back(flow.base[s] + a, ctilde[s][a]);
  flow.lp.add_row(LpRelation::kEq, vstar, std::move(coeffs), "value");
  return run_flow_lp(mdp, analysis, std::move(flow), "solve_selection_lp");
}

StationaryPolicy extract_policy(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& lambda) {
  const StatePartition& part = analysis.partition;
  std::vector<int> choice(mdp.num_states(), 0);
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (part.in_target[s] || part.in_zero[s]) continue;
    int picked = -1;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (lambda[s][a] > kFlowTol) {
        picked = a;
        break;
      }
    if (picked < 0) picked = analysis.amax[s].front();
    choice[s] = picked;
  }
  return StationaryPolicy::pure(mdp, choice);
}

double surrogate_value(const Mdp& mdp, const StationaryPolicy& policy,
                       const std::vector<std::vector<double>>& cost_table) {
  const int n = mdp.num_states();
  const InducedChain chain = induced_chain(mdp, policy);
  std::vector<char> seen(n, 0);
  std::deque<int> queue{mdp.initial};
  seen[mdp.initial] = 1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int t = 0; t < n; ++t)
      if (!seen[t] && chain.p(s, t) > 0.0) {
        seen[t] = 1;
        queue.push_back(t);
      }
  }

  std::vector<double> step_cost(n, 0.0);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      step_cost[s] += policy.prob[s][a] * cost_table[s][a];

  // Forward closure of each reached state; s is recurrent exactly when every
  // state it reaches leads back. A recurrent state is revisited forever, so
  // positive per-visit cost there makes the total blow up.
  std::vector<std::vector<char>> closure(n);
  for (int s = 0; s < n; ++s) {
    if (!seen[s]) continue;
    closure[s].assign(n, 0);
    closure[s][s] = 1;
    std::deque<int> bfs{s};
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop_front();
      for (int t = 0; t < n; ++t)
        if (!closure[s][t] && chain.p(u, t) > 0.0) {
          closure[s][t] = 1;
          bfs.push_back(t);
        }
    }
  }

  std::vector<int> solve_states;
  for (int s = 0; s < n; ++s) {
    if (!seen[s]) continue;
    bool recurrent = true;
    for (int t = 0; t < n && recurrent; ++t)
      if (closure[s][t] && !closure[t][s]) recurrent = false;
    if (recurrent) {
      if (step_cost[s] > 1e-15)
        return std::numeric_limits<double>::infinity();
    } else {
      solve_states.push_back(s);  // transient: finite expected visit count
    }
  }
  if (solve_states.empty()) return 0.0;

  const int k = static_cast<int>(solve_states.size());
  std::vector<int> pos(n, -1);
  for (int i = 0; i < k; ++i) pos[solve_states[i]] = i;
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) {
    const int s = solve_states[i];
    rhs(i) = step_cost[s];
    for (int j = 0; j < k; ++j) system(i, j) -= chain.p(s, solve_states[j]);
  }
  const Eigen::VectorXd u = system.partialPivLu().solve(rhs);
  return pos[mdp.initial] >= 0 ? u(pos[mdp.initial]) : 0.0;
}

ApproxCertificate suboptimality_certificate(
    const Mdp& mdp, const ReachAnalysis& analysis,
    const std::vector<std::vector<double>>& ctilde, double k) {
  ApproxCertificate cert;
  cert.cmin = std::numeric_limits<double>::infinity();
  cert.ctilde_max = 0.0;
  for (int s : analysis.partition.rest)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      cert.cmin = std::min(cert.cmin, mdp.actions[s][a].cost);
      cert.ctilde_max = std::max(cert.ctilde_max, ctilde[s][a]);
    }
  if (!std::isfinite(cert.cmin)) cert.cmin = 0.0;

  // Minimum expected discounted time spent in Sr over all policies. The
  // discounting is what makes cmin * m_under a true lower bound on J; mass
  // never re-enters Sr, so restricting the balance rows to Sr is exact.
  const StatePartition& part = analysis.partition;
  LinearProgram dwell;
  std::vector<int> base(mdp.num_states(), -1);
  for (int s : part.rest) {
    base[s] = dwell.num_vars();
    for (int a = 0; a < mdp.num_actions(s); ++a)
      dwell.add_variable(
          "l_" + mdp.state_names[s] + "_" + mdp.actions[s][a].name, 1.0);
  }
  for (int s : part.rest) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      coeffs.emplace_back(base[s] + a, 1.0);
    for (int sp : part.rest)
      for (int a = 0; a < mdp.num_actions(sp); ++a)
        for (const auto& [next, p] : mdp.actions[sp][a].transitions)
          if (next == s && p > 0.0)
            coeffs.emplace_back(base[sp] + a, -mdp.discount * p);
    dwell.add_row(LpRelation::kEq, s == mdp.initial ? 1.0 : 0.0,
                  std::move(coeffs), "bal_" + mdp.state_names[s]);
  }
  const LpSolution visits = solve_lp(dwell);
  if (visits.status != LpStatus::kOptimal)
    throw std::runtime_error("suboptimality_certificate: dwell LP ended " +
                             to_string(visits.status));
  cert.m_under = visits.objective;

  const BigM m = big_m(mdp, k);
  cert.m_upper = m.value;
  cert.m_upper_certified = m.certified;
  cert.gap_bound = cert.m_upper * cert.ctilde_max - cert.m_under * cert.cmin;
  if (m.certified)
    cert.gap_bound_deterministic =
        static_cast<double>(mdp.num_states()) * cert.ctilde_max;
  return cert;
}

namespace {

SynthesisReport synth_flow(const Mdp& mdp, double k, bool zero_terminal_costs,
                           bool discount_weighted, const char* method) {
  const auto started = std::chrono::steady_clock::now();
  const ReachAnalysis ra = max_reach(mdp);

  SynthesisReport report;
  report.method = method;
  report.bounds["x_initial"] = ra.x[mdp.initial];
  report.stats.lp_iterations = ra.lp_iterations;

  if (mdp.is_target(mdp.initial)) {
    const Mdp mprime = cleanup(mdp, ra);
    const DiscountAnalysis da = optimal_values(mprime);
    report.policy = lift_policy(mprime, mdp, da.pitilde);
    report.surrogate_cost = 0.0;
    report.diagnostics.push_back("initial state is a target");
  } else {
    std::vector<std::vector<double>> ctilde;
    if (discount_weighted) {
      ctilde = modified_costs(mdp, ra.partition, zero_terminal_costs,
                              &report.diagnostics);
    } else {
      // Plain total-cost surrogate: keep original costs on Sr.
      ctilde = modified_costs(mdp, ra.partition, zero_terminal_costs,
                              &report.diagnostics);
      for (int s : ra.partition.rest)
        for (int a = 0; a < mdp.num_actions(s); ++a)
          ctilde[s][a] = mdp.actions[s][a].cost;
    }

    const OccupationLp first = solve_surrogate_lp(mdp, ra, ctilde);
    const OccupationLp second =
        solve_selection_lp(mdp, ra, ctilde, first.value);
    report.stats.lp_iterations += first.lp_iterations + second.lp_iterations;
    report.policy = extract_policy(mdp, ra, second.lambda);
    const double exact_surrogate = surrogate_value(mdp, report.policy, ctilde);
    report.surrogate_cost = exact_surrogate;
    if (std::abs(exact_surrogate - first.value) >
        1e-6 * std::max(1.0, std::abs(first.value))) {
      std::ostringstream msg;
      msg << method << ": extracted policy surrogate " << exact_surrogate
          << " drifts from the LP optimum " << first.value;
      throw std::runtime_error(msg.str());
    }
    report.bounds["v_star"] = first.value;
    report.bounds["expected_visits"] = second.value;

    const ApproxCertificate cert =
        suboptimality_certificate(mdp, ra, ctilde, k);
    report.bounds["cmin"] = cert.cmin;
    report.bounds["ctilde_max"] = cert.ctilde_max;
    report.bounds["m_under"] = cert.m_under;
    report.bounds["m_upper"] = cert.m_upper;
    report.bounds["gap_bound"] = cert.gap_bound;
    if (cert.gap_bound_deterministic)
      report.bounds["gap_bound_deterministic"] =
          *cert.gap_bound_deterministic;
    if (!cert.m_upper_certified)
      report.diagnostics.push_back(
          "occupation upper bound uses the k*|S| surrogate and is not "
          "certified for stochastic transitions");
  }

  report.reach = reach_prob(mdp, report.policy);
  report.cost = evaluate_cost(mdp, report.policy);
  if (std::abs(report.reach - ra.x[mdp.initial]) > 1e-6) {
    std::ostringstream msg;
    msg << method << ": extracted policy reaches " << report.reach
        << " but the maximum is " << ra.x[mdp.initial];
    throw std::runtime_error(msg.str());
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return report;
}

}  // namespace

SynthesisReport synth_approx(const Mdp& mdp, double k,
                             bool zero_terminal_costs) {
  return synth_flow(mdp, k, zero_terminal_costs, true, "approx");
}

SynthesisReport synth_total_cost(const Mdp& mdp, bool zero_terminal_costs) {
  return synth_flow(mdp, 100.0, zero_terminal_costs, false, "total");
}

SynthesisReport synth_discounted_baseline(const Mdp& mdp) {
  const auto started = std::chrono::steady_clock::now();

  SynthesisReport report;
  report.method = "baseline";

  const int n = mdp.num_states();
  std::vector<std::vector<double>> reward(n);
  for (int s = 0; s < n; ++s) {
    reward[s].assign(mdp.num_actions(s), 0.0);
    if (mdp.is_target(s)) continue;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        if (mdp.is_target(next)) reward[s][a] += p;
  }

  LinearProgram lp;
  lp.sense = LpSense::kMaximize;
  std::vector<int> base(n);
  for (int s = 0; s < n; ++s) {
    base[s] = lp.num_vars();
    for (int a = 0; a < mdp.num_actions(s); ++a)
      lp.add_variable("l_" + mdp.state_names[s] + "_" + mdp.actions[s][a].name,
                      reward[s][a]);
  }
  for (int s = 0; s < n; ++s) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      coeffs.emplace_back(base[s] + a, 1.0);
    for (int sp = 0; sp < n; ++sp)
      for (int a = 0; a < mdp.num_actions(sp); ++a)
        for (const auto& [next, p] : mdp.actions[sp][a].transitions)
          if (next == s && p > 0.0)
            coeffs.emplace_back(base[sp] + a, -mdp.discount * p);
    lp.add_row(LpRelation::kEq, s == mdp.initial ? 1.0 : 0.0,
               std::move(coeffs), "bal_" + mdp.state_names[s]);
  }
  const LpSolution first = solve_lp(lp);
  if (first.status != LpStatus::kOptimal)
    throw std::runtime_error("synth_discounted_baseline: reward LP ended " +
                             to_string(first.status));
  report.bounds["discounted_reach"] = first.objective;
  report.stats.lp_iterations = first.iterations;

  lp.sense = LpSense::kMinimize;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      lp.objective[base[s] + a] = mdp.actions[s][a].cost;
  std::vector<std::pair<int, double>> pin;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (reward[s][a] > 0.0) pin.emplace_back(base[s] + a, reward[s][a]);
  lp.add_row(LpRelation::kEq, first.objective, std::move(pin), "reach_value");
  const LpSolution second = solve_lp(lp);
  if (second.status != LpStatus::kOptimal)
    throw std::runtime_error("synth_discounted_baseline: cost LP ended " +
                             to_string(second.status));
  report.stats.lp_iterations += second.iterations;

  std::vector<int> choice(n, 0);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (second.x[base[s] + a] > kFlowTol) {
        choice[s] = a;
        break;
      }
  report.policy = StationaryPolicy::pure(mdp, choice);
  report.reach = reach_prob(mdp, report.policy);
  report.cost = evaluate_cost(mdp, report.policy);
  report.bounds["x_initial"] = max_reach(mdp).x[mdp.initial];
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return report;
}

}  // namespace mdpsynth
