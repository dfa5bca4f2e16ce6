#include "mdpsynth/exact_milp.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mdpsynth/discount.hpp"

namespace mdpsynth {

namespace {

bool deterministic_transitions(const Mdp& mdp) {
  for (int s = 0; s < mdp.num_states(); ++s)
    for (const auto& act : mdp.actions[s]) {
      std::vector<std::pair<int, double>> mass;
      for (const auto& [next, p] : act.transitions) {
        bool merged = false;
        for (auto& [existing, total] : mass)
          if (existing == next) {
            total += p;
            merged = true;
            break;
          }
        if (!merged) mass.emplace_back(next, p);
      }
      for (const auto& [next, total] : mass)
        if (std::abs(total - 1.0) > 1e-12 && std::abs(total) > 1e-12)
          return false;
    }
  return true;
}

}  // namespace

BigM big_m(const Mdp& mdp, double k) {
  BigM result;
  const double n = static_cast<double>(mdp.num_states());
  if (deterministic_transitions(mdp)) {
    result.value = n;
    result.certified = true;
    result.note =
        "deterministic transitions: |S| bounds the expected time spent "
        "outside the target and zero classes";
  } else {
    result.value = k * n;
    result.certified = false;
    result.note =
        "stochastic transitions: k*|S| is a surrogate; correctness requires "
        "it to dominate the true occupation bound";
  }
  return result;
}

MilpModel build_milp(const Mdp& mdp, const ReachAnalysis& analysis,
                     double big_m_value) {
  const StatePartition& part = analysis.partition;
  const int n = mdp.num_states();

  MilpModel model;
  model.big_m = big_m_value;
  model.reach_target = analysis.x[mdp.initial];
  model.lambda1_base.resize(n);
  model.lambda2_base.resize(n);
  model.delta_base.resize(n);
  model.reward.resize(n);

  MixedIntegerProgram& mip = model.mip;
  mip.lp.sense = LpSense::kMinimize;

  for (int s = 0; s < n; ++s) {
    const bool in_sr = !part.in_target[s] && !part.in_zero[s];
    model.lambda1_base[s] = mip.lp.num_vars();
    for (int a = 0; a < mdp.num_actions(s); ++a)
      mip.lp.add_variable(
          "l1_" + mdp.state_names[s] + "_" + mdp.actions[s][a].name,
          mdp.actions[s][a].cost);
    model.lambda2_base[s] = mip.lp.num_vars();
    for (int a = 0; a < mdp.num_actions(s); ++a)
      mip.lp.add_variable(
          "l2_" + mdp.state_names[s] + "_" + mdp.actions[s][a].name, 0.0, 0.0,
          in_sr ? big_m_value : 0.0);
    model.delta_base[s] = mip.lp.num_vars();
    mip.binary.resize(mip.lp.num_vars(), 0);
    for (int a = 0; a < mdp.num_actions(s); ++a)
      mip.add_binary("d_" + mdp.state_names[s] + "_" + mdp.actions[s][a].name,
                     0.0);
    model.reward[s].assign(mdp.num_actions(s), 0.0);
    if (in_sr)
      for (int a = 0; a < mdp.num_actions(s); ++a)
        for (const auto& [next, p] : mdp.actions[s][a].transitions)
          if (part.in_target[next]) model.reward[s][a] += p;
  }

  // Discounted balance at every state.
  for (int s = 0; s < n; ++s) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      coeffs.emplace_back(model.lambda1(s, a), 1.0);
    for (int sp = 0; sp < n; ++sp)
      for (int a = 0; a < mdp.num_actions(sp); ++a)
        for (const auto& [next, p] : mdp.actions[sp][a].transitions)
          if (next == s && p > 0.0)
            coeffs.emplace_back(model.lambda1(sp, a), -mdp.discount * p);
    mip.lp.add_row(LpRelation::kEq, s == mdp.initial ? 1.0 : 0.0,
                   std::move(coeffs), "bal1_" + mdp.state_names[s]);
  }

  // Undiscounted balance on Sr.
  for (int s : part.rest) {
    std::vector<std::pair<int, double>> coeffs;
    for (int a = 0; a < mdp.num_actions(s); ++a)
      coeffs.emplace_back(model.lambda2(s, a), 1.0);
    for (int sp : part.rest)
      for (int a = 0; a < mdp.num_actions(sp); ++a)
        for (const auto& [next, p] : mdp.actions[sp][a].transitions)
          if (next == s && p > 0.0)
            coeffs.emplace_back(model.lambda2(sp, a), -p);
    mip.lp.add_row(LpRelation::kEq, s == mdp.initial ? 1.0 : 0.0,
                   std::move(coeffs), "bal2_" + mdp.state_names[s]);
  }

  // Expected one-step mass into the target set equals the best reach value.
  {
    std::vector<std::pair<int, double>> coeffs;
    for (int s : part.rest)
      for (int a = 0; a < mdp.num_actions(s); ++a)
        if (model.reward[s][a] > 0.0)
          coeffs.emplace_back(model.lambda2(s, a), model.reward[s][a]);
    mip.lp.add_row(LpRelation::kEq, model.reach_target, std::move(coeffs),
                   "reach");
  }

  // Linking rows and one action per state.
  for (int s = 0; s < n; ++s) {
    const bool in_sr = !part.in_target[s] && !part.in_zero[s];
    std::vector<std::pair<int, double>> pick;
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      mip.lp.add_row(LpRelation::kLe, 0.0,
                     {{model.lambda1(s, a), 1.0},
                      {model.delta(s, a), -big_m_value}},
                     "link1_" + mdp.state_names[s] + "_" +
                         mdp.actions[s][a].name);
      if (in_sr)
        mip.lp.add_row(LpRelation::kLe, 0.0,
                       {{model.lambda2(s, a), 1.0},
                        {model.delta(s, a), -big_m_value}},
                       "link2_" + mdp.state_names[s] + "_" +
                           mdp.actions[s][a].name);
      pick.emplace_back(model.delta(s, a), 1.0);
    }
    mip.lp.add_row(LpRelation::kLe, 1.0, std::move(pick),
                   "pick_" + mdp.state_names[s]);
  }
  return model;
}

SynthesisReport solve_exact(const Mdp& mdp, double k, double time_limit_sec) {
  const auto started = std::chrono::steady_clock::now();
  const ReachAnalysis ra = max_reach(mdp);

  SynthesisReport report;
  report.method = "exact";
  report.bounds["x_initial"] = ra.x[mdp.initial];

  if (mdp.is_target(mdp.initial)) {
    // Every policy reaches immediately; minimize cost unconditionally.
    const Mdp mprime = cleanup(mdp, ra);
    const DiscountAnalysis da = optimal_values(mprime);
    report.policy = lift_policy(mprime, mdp, da.pitilde);
    report.infimum = da.y[mdp.initial];
    report.diagnostics.push_back("initial state is a target");
  } else {
    const BigM m = big_m(mdp, k);
    const MilpModel model = build_milp(mdp, ra, m.value);
    MilpOptions options;
    options.time_limit_sec = time_limit_sec;
    const MilpResult res = solve_milp(model.mip, options);
    report.stats.milp_nodes = res.nodes;
    report.stats.lp_iterations = res.lp_iterations + ra.lp_iterations;
    report.stats.timed_out = res.timed_out;
    report.bounds["big_m"] = m.value;
    if (!m.certified)
      report.diagnostics.push_back(m.note);

    if (res.status == LpStatus::kInfeasible)
      throw std::runtime_error(
          "solve_exact: MILP infeasible; the big-M constant is likely too "
          "small for this instance");
    if (res.x.empty())
      throw std::runtime_error(
          "solve_exact: time limit hit before the first incumbent");

    report.bounds["milp_objective"] = res.objective;
    report.bounds["best_bound"] = res.best_bound;
    report.stats.milp_gap = res.objective - res.best_bound;

    std::vector<int> choice(mdp.num_states(), 0);
    for (int s = 0; s < mdp.num_states(); ++s)
      for (int a = 0; a < mdp.num_actions(s); ++a)
        if (res.x[model.delta(s, a)] > 0.5) {
          choice[s] = a;
          break;
        }
    report.policy = StationaryPolicy::pure(mdp, choice);

    const double cost = evaluate_cost(mdp, report.policy);
    if (res.status == LpStatus::kOptimal &&
        std::abs(cost - res.objective) > 1e-5 * std::max(1.0, std::abs(cost))) {
      std::ostringstream note;
      note << "solve_exact: extracted policy cost " << cost
           << " drifts from MILP objective " << res.objective;
      throw std::runtime_error(note.str());
    }
  }

  report.reach = reach_prob(mdp, report.policy);
  report.cost = evaluate_cost(mdp, report.policy);
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return report;
}

}  // namespace mdpsynth
