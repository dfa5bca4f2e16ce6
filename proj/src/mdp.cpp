#include "mdpsynth/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mdpsynth {

namespace {

constexpr double kRowSumTol = 1e-9;

bool prob_sums_to_one(double total) { return std::abs(total - 1.0) <= kRowSumTol; }

}  // namespace

int Mdp::num_pairs() const {
  int n = 0;
  for (const auto& acts : actions) n += static_cast<int>(acts.size());
  return n;
}

bool Mdp::is_target(int s) const {
  return std::binary_search(targets.begin(), targets.end(), s);
}

int Mdp::state_id(const std::string& name) const {
  for (int s = 0; s < num_states(); ++s)
    if (state_names[s] == name) return s;
  return -1;
}

int Mdp::action_id(int s, const std::string& name) const {
  for (int a = 0; a < num_actions(s); ++a)
    if (actions[s][a].name == name) return a;
  return -1;
}

std::vector<ValidationIssue> validate(const Mdp& mdp) {
  std::vector<ValidationIssue> issues;
  auto add = [&issues](int s, int a, std::string rule, std::string message) {
    issues.push_back({s, a, std::move(rule), std::move(message)});
  };

  const int n = mdp.num_states();
  if (static_cast<int>(mdp.actions.size()) != n) {
    add(-1, -1, "shape", "actions table size differs from state count");
    return issues;
  }
  if (n == 0) {
    add(-1, -1, "shape", "empty state set");
    return issues;
  }
  if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
    add(-1, -1, "discount", "discount must lie strictly inside (0,1)");
  if (mdp.initial < 0 || mdp.initial >= n)
    add(-1, -1, "initial", "initial state id out of range");

  std::set<std::string> state_seen;
  for (int s = 0; s < n; ++s)
    if (!state_seen.insert(mdp.state_names[s]).second)
      add(s, -1, "unique-names", "duplicate state name " + mdp.state_names[s]);

  if (!std::is_sorted(mdp.targets.begin(), mdp.targets.end()))
    add(-1, -1, "targets", "target list must be sorted");
  for (int t : mdp.targets)
    if (t < 0 || t >= n) add(t, -1, "targets", "target id out of range");

  for (int s = 0; s < n; ++s) {
    if (mdp.actions[s].empty()) {
      add(s, -1, "actions", "state " + mdp.state_names[s] + " has no actions");
      continue;
    }
    std::set<std::string> action_seen;
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const ActionSpec& act = mdp.actions[s][a];
      if (!action_seen.insert(act.name).second)
        add(s, a, "unique-names", "duplicate action name " + act.name +
                                      " at state " + mdp.state_names[s]);
      if (!(act.cost >= 0.0) || !std::isfinite(act.cost))
        add(s, a, "cost", "negative or non-finite cost at " +
                              mdp.state_names[s] + "/" + act.name);
      double total = 0.0;
      double self_mass = 0.0;
      for (const auto& [next, p] : act.transitions) {
        if (next < 0 || next >= n) {
          add(s, a, "transition", "successor id out of range at " +
                                      mdp.state_names[s] + "/" + act.name);
          continue;
        }
        if (!(p >= 0.0 && p <= 1.0 + kRowSumTol))
          add(s, a, "probability", "probability outside [0,1] at " +
                                       mdp.state_names[s] + "/" + act.name);
        total += p;
        if (next == s) self_mass += p;
      }
      if (!prob_sums_to_one(total))
        add(s, a, "row-sum", "transition row of " + mdp.state_names[s] + "/" +
                                 act.name + " sums to " + std::to_string(total));
      if (mdp.is_target(s) && !prob_sums_to_one(self_mass))
        add(s, a, "absorbing-target",
            "target state " + mdp.state_names[s] + " is not absorbing under " +
                act.name);
    }
  }
  return issues;
}

void require_valid(const Mdp& mdp) {
  const auto issues = validate(mdp);
  if (issues.empty()) return;
  std::ostringstream out;
  out << "invalid MDP:";
  for (const auto& issue : issues) out << "\n  [" << issue.rule << "] " << issue.message;
  throw std::runtime_error(out.str());
}

StationaryPolicy StationaryPolicy::pure(const Mdp& mdp,
                                        const std::vector<int>& choice) {
  if (static_cast<int>(choice.size()) != mdp.num_states())
    throw std::invalid_argument("choice vector size differs from state count");
  StationaryPolicy policy;
  policy.prob.resize(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (choice[s] < 0 || choice[s] >= mdp.num_actions(s))
      throw std::invalid_argument("choice out of range at state " +
                                  mdp.state_names[s]);
    policy.prob[s].assign(mdp.num_actions(s), 0.0);
    policy.prob[s][choice[s]] = 1.0;
  }
  return policy;
}

bool StationaryPolicy::is_deterministic() const {
  for (const auto& row : prob) {
    int ones = 0;
    for (double p : row) {
      if (p == 1.0)
        ++ones;
      else if (p != 0.0)
        return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

std::vector<int> StationaryPolicy::choices() const {
  std::vector<int> result(prob.size(), -1);
  for (std::size_t s = 0; s < prob.size(); ++s)
    for (std::size_t a = 0; a < prob[s].size(); ++a)
      if (prob[s][a] == 1.0) {
        result[s] = static_cast<int>(a);
        break;
      }
  return result;
}

void require_policy_shape(const Mdp& mdp, const StationaryPolicy& policy) {
  if (static_cast<int>(policy.prob.size()) != mdp.num_states())
    throw std::invalid_argument("policy has wrong number of states");
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (static_cast<int>(policy.prob[s].size()) != mdp.num_actions(s))
      throw std::invalid_argument("policy row size mismatch at state " +
                                  mdp.state_names[s]);
    double total = 0.0;
    for (double p : policy.prob[s]) {
      if (!(p >= -kRowSumTol) || !std::isfinite(p))
        throw std::invalid_argument("negative policy probability at state " +
                                    mdp.state_names[s]);
      total += p;
    }
    if (std::abs(total - 1.0) > kRowSumTol)
      throw std::invalid_argument("policy row at state " + mdp.state_names[s] +
                                  " sums to " + std::to_string(total));
  }
}

StationaryPolicy lift_policy(const Mdp& sub, const Mdp& parent,
                             const StationaryPolicy& policy) {
  require_policy_shape(sub, policy);
  if (sub.num_states() != parent.num_states())
    throw std::invalid_argument("lift_policy: state spaces differ");
  StationaryPolicy lifted;
  lifted.prob.resize(parent.num_states());
  for (int s = 0; s < parent.num_states(); ++s) {
    lifted.prob[s].assign(parent.num_actions(s), 0.0);
    for (int a = 0; a < sub.num_actions(s); ++a) {
      const int pa = parent.action_id(s, sub.actions[s][a].name);
      if (pa < 0)
        throw std::invalid_argument("lift_policy: action " +
                                    sub.actions[s][a].name +
                                    " missing in parent at state " +
                                    parent.state_names[s]);
      lifted.prob[s][pa] = policy.prob[s][a];
    }
  }
  return lifted;
}

InducedChain induced_chain(const Mdp& mdp, const StationaryPolicy& policy) {
  require_policy_shape(mdp, policy);
  const int n = mdp.num_states();
  InducedChain chain;
  chain.p = Eigen::MatrixXd::Zero(n, n);
  chain.cost = Eigen::VectorXd::Zero(n);
  chain.alpha = Eigen::VectorXd::Zero(n);
  chain.alpha[mdp.initial] = 1.0;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const double w = policy.prob[s][a];
      if (w == 0.0) continue;
      chain.cost[s] += w * mdp.actions[s][a].cost;
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        chain.p(s, next) += w * p;
    }
  return chain;
}

StatePartition partition_states(const Mdp& mdp) {
  const int n = mdp.num_states();
  StatePartition part;
  part.in_target.assign(n, 0);
  part.in_zero.assign(n, 0);
  part.tmin.assign(n, StatePartition::kUnreachable);

  for (int t : mdp.targets) part.in_target[t] = 1;
  part.targets = mdp.targets;

  // Backward closure from the targets over positive-probability edges.
  std::vector<std::vector<int>> predecessors(n);
  for (int s = 0; s < n; ++s)
    for (const auto& act : mdp.actions[s])
      for (const auto& [next, p] : act.transitions)
        if (p > 0.0) predecessors[next].push_back(s);

  std::vector<char> can_reach(n, 0);
  std::deque<int> queue(mdp.targets.begin(), mdp.targets.end());
  for (int t : mdp.targets) can_reach[t] = 1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int pred : predecessors[s])
      if (!can_reach[pred]) {
        can_reach[pred] = 1;
        queue.push_back(pred);
      }
  }
  for (int s = 0; s < n; ++s) {
    if (part.in_target[s]) continue;
    if (can_reach[s])
      part.rest.push_back(s);
    else {
      part.in_zero[s] = 1;
      part.zero.push_back(s);
    }
  }

  // Forward BFS from the initial state; tmin counts path vertices.
  part.tmin[mdp.initial] = 1;
  queue.assign(1, mdp.initial);
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (const auto& act : mdp.actions[s])
      for (const auto& [next, p] : act.transitions)
        if (p > 0.0 && part.tmin[next] == StatePartition::kUnreachable) {
          part.tmin[next] = part.tmin[s] + 1;
          queue.push_back(next);
        }
  }
  return part;
}

std::vector<int> reachable_states(const Mdp& mdp,
                                  const StationaryPolicy& policy) {
  require_policy_shape(mdp, policy);
  std::vector<char> seen(mdp.num_states(), 0);
  std::deque<int> queue{mdp.initial};
  seen[mdp.initial] = 1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      if (policy.prob[s][a] == 0.0) continue;
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        if (p > 0.0 && !seen[next]) {
          seen[next] = 1;
          queue.push_back(next);
        }
    }
  }
  std::vector<int> result;
  for (int s = 0; s < mdp.num_states(); ++s)
    if (seen[s]) result.push_back(s);
  return result;
}

}  // namespace mdpsynth
