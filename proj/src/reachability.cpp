#include "mdpsynth/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/Dense>

namespace mdpsynth {

namespace {

constexpr double kAmaxTol = 1e-7;

}  // namespace

ReachAnalysis max_reach(const Mdp& mdp) {
  require_valid(mdp);
  ReachAnalysis analysis;
  analysis.partition = partition_states(mdp);
  const StatePartition& part = analysis.partition;
  const int n = mdp.num_states();

  // Variables: one per Sr state, pinned boundary values substituted.
  std::vector<int> var_of(n, -1);
  LinearProgram lp;
  for (int s : part.rest)
    var_of[s] = lp.add_variable("x_" + mdp.state_names[s], 1.0, 0.0, 1.0);

  for (int s : part.rest) {
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      std::vector<std::pair<int, double>> coeffs{{var_of[s], 1.0}};
      double rhs = 0.0;
      for (const auto& [next, p] : mdp.actions[s][a].transitions) {
        if (part.in_target[next])
          rhs += p;
        else if (var_of[next] >= 0) {
          if (next == s)
            coeffs[0].second -= p;
          else
            coeffs.emplace_back(var_of[next], -p);
        }
      }
      lp.add_row(LpRelation::kGe, rhs, std::move(coeffs),
                 mdp.state_names[s] + "/" + mdp.actions[s][a].name);
    }
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("max_reach: LP did not solve to optimality (" +
                             to_string(sol.status) + ")");
  analysis.lp_iterations = sol.iterations;

  analysis.x.assign(n, 0.0);
  for (int t : part.targets) analysis.x[t] = 1.0;
  for (int s : part.rest)
    analysis.x[s] = std::clamp(sol.x[var_of[s]], 0.0, 1.0);

  analysis.amax.resize(n);
  for (int s = 0; s < n; ++s) {
    if (var_of[s] < 0) {
      analysis.amax[s].resize(mdp.num_actions(s));
      for (int a = 0; a < mdp.num_actions(s); ++a) analysis.amax[s][a] = a;
      continue;
    }
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      double backup = 0.0;
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        backup += p * analysis.x[next];
      if (analysis.x[s] - backup <= kAmaxTol) analysis.amax[s].push_back(a);
    }
    if (analysis.amax[s].empty())
      throw std::runtime_error("max_reach: no maximizing action at state " +
                               mdp.state_names[s]);
  }
  return analysis;
}

Mdp cleanup(const Mdp& mdp, const ReachAnalysis& analysis) {
  Mdp cleaned = mdp;
  for (int s : analysis.partition.rest) {
    std::vector<ActionSpec> kept;
    kept.reserve(analysis.amax[s].size());
    for (int a : analysis.amax[s]) kept.push_back(mdp.actions[s][a]);
    cleaned.actions[s] = std::move(kept);
  }
  require_valid(cleaned);
  return cleaned;
}

double reach_prob(const Mdp& mdp, const StationaryPolicy& policy) {
  if (mdp.is_target(mdp.initial)) return 1.0;
  const InducedChain chain = induced_chain(mdp, policy);
  const std::vector<int> reachable = reachable_states(mdp, policy);
  std::vector<char> in_reach(mdp.num_states(), 0);
  for (int s : reachable) in_reach[s] = 1;

  // States inside the reachable set with a chain path into the target set.
  std::vector<char> can_hit(mdp.num_states(), 0);
  std::deque<int> queue;
  for (int t : mdp.targets)
    if (in_reach[t]) {
      can_hit[t] = 1;
      queue.push_back(t);
    }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int pred : reachable)
      if (!can_hit[pred] && chain.p(pred, s) > 0.0) {
        can_hit[pred] = 1;
        queue.push_back(pred);
      }
  }

  std::vector<int> solve_states;
  std::vector<int> index_of(mdp.num_states(), -1);
  for (int s : reachable)
    if (can_hit[s] && !mdp.is_target(s)) {
      index_of[s] = static_cast<int>(solve_states.size());
      solve_states.push_back(s);
    }
  if (index_of[mdp.initial] < 0) return 0.0;

  const int k = static_cast<int>(solve_states.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd into_target = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    const int s = solve_states[i];
    for (int next = 0; next < mdp.num_states(); ++next) {
      const double p = chain.p(s, next);
      if (p == 0.0) continue;
      if (mdp.is_target(next))
        into_target[i] += p;
      else if (index_of[next] >= 0)
        q(i, index_of[next]) += p;
    }
  }
  const Eigen::VectorXd z =
      (Eigen::MatrixXd::Identity(k, k) - q).partialPivLu().solve(into_target);
  return std::clamp(z[index_of[mdp.initial]], 0.0, 1.0);
}

}  // namespace mdpsynth
