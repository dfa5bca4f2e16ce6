#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mdpsynth {

/// One action available at a state: display name, immediate cost and a sparse
/// successor distribution over dense state ids.
struct ActionSpec {
  std::string name;
  double cost = 0.0;
  std::vector<std::pair<int, double>> transitions;  // (state id, probability)
};

/// Finite MDP with dense integer state ids, a single initial state, an
/// absorbing target set and a discount factor strictly inside (0,1).
/// Treated as immutable once built; all operations take it by const ref.
struct Mdp {
  std::vector<std::string> state_names;
  std::vector<std::vector<ActionSpec>> actions;  // per state, non-empty
  int initial = 0;
  std::vector<int> targets;  // sorted, deduplicated
  double discount = 0.9;

  int num_states() const { return static_cast<int>(state_names.size()); }
  int num_actions(int s) const { return static_cast<int>(actions[s].size()); }
  /// Total number of state/action pairs.
  int num_pairs() const;
  bool is_target(int s) const;
  /// Dense id for a state name, -1 if absent.
  int state_id(const std::string& name) const;
  /// Index of an action name at state s, -1 if absent.
  int action_id(int s, const std::string& name) const;
};

/// A single validation finding; `state`/`action` are -1 when not applicable.
struct ValidationIssue {
  int state = -1;
  int action = -1;
  std::string rule;
  std::string message;
};

/// Structural checks: row sums within 1e-9 of one, probabilities in [0,1],
/// costs non-negative and finite, discount strictly inside (0,1), valid
/// initial/target ids, absorbing targets, non-empty action sets, unique
/// names. Empty result means the MDP is valid.
std::vector<ValidationIssue> validate(const Mdp& mdp);

/// Throws std::runtime_error listing every validation issue, if any.
void require_valid(const Mdp& mdp);

/// Stationary randomized policy; prob[s] is aligned with mdp.actions[s] and
/// sums to one.
struct StationaryPolicy {
  std::vector<std::vector<double>> prob;

  /// Deterministic policy taking actions[s][choice[s]] with probability one.
  static StationaryPolicy pure(const Mdp& mdp, const std::vector<int>& choice);
  /// True iff every row has exactly one entry equal to one.
  bool is_deterministic() const;
  /// Chosen action per state for deterministic policies (lowest index carrying
  /// the full mass); -1 for rows that randomize.
  std::vector<int> choices() const;
};

/// Shape/stochasticity check for a policy against an MDP; throws on mismatch.
void require_policy_shape(const Mdp& mdp, const StationaryPolicy& policy);

/// Lifts a policy defined on a sub-MDP (same states, per-state action subsets
/// matched by name) back onto `parent`; probabilities of pruned actions are 0.
StationaryPolicy lift_policy(const Mdp& sub, const Mdp& parent,
                             const StationaryPolicy& policy);

/// Markov chain induced by a stationary policy: transition matrix, per-state
/// expected immediate cost and the initial distribution (a point mass).
struct InducedChain {
  Eigen::MatrixXd p;
  Eigen::VectorXd cost;
  Eigen::VectorXd alpha;
};

InducedChain induced_chain(const Mdp& mdp, const StationaryPolicy& policy);

/// Partition of the state space by reachability of the target set, together
/// with minimum path lengths from the initial state.
///
/// `targets` is B, `zero` the states from which no action sequence reaches B
/// with positive probability, `rest` everything else (Sr). `tmin[s]` counts
/// vertices on a shortest path from the initial state to s in the digraph
/// whose edges are positive-probability transitions under any action, so
/// tmin[initial] == 1; unreachable states hold kUnreachable.
struct StatePartition {
  static constexpr int kUnreachable = -1;

  std::vector<int> targets;
  std::vector<int> zero;
  std::vector<int> rest;
  std::vector<char> in_target;
  std::vector<char> in_zero;
  std::vector<int> tmin;
};

/// Graph-theoretic partition; independent of any policy.
StatePartition partition_states(const Mdp& mdp);

/// States reachable from the initial state along positive-probability edges
/// of the policy's support. Sorted, always contains the initial state.
std::vector<int> reachable_states(const Mdp& mdp,
                                  const StationaryPolicy& policy);

}  // namespace mdpsynth
