#pragma once

#include <vector>

#include "mdpsynth/linprog.hpp"
#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

/// Maximum reachability analysis: x[s] is the best probability of eventually
/// hitting the target set from s, amax[s] the actions attaining it.
struct ReachAnalysis {
  StatePartition partition;
  std::vector<double> x;
  std::vector<std::vector<int>> amax;  // action indices; all of A(s) off Sr
  long lp_iterations = 0;
};

/// Least fixed point of the reachability equations, computed by linear
/// programming (minimize sum x subject to x_s >= sum_a P x for s in Sr, with
/// x pinned to 1 on targets and 0 on the zero class). Membership in amax uses
/// tolerance 1e-7.
ReachAnalysis max_reach(const Mdp& mdp);

/// Cleaned-up MDP: action sets reduced to amax(s) on Sr; targets and the zero
/// class keep their full action sets. States, names, ids unchanged.
Mdp cleanup(const Mdp& mdp, const ReachAnalysis& analysis);

/// Exact probability that the chain induced by `policy` reaches the target
/// set from the initial state, via a linear solve on the reachable transient
/// part of Sr.
double reach_prob(const Mdp& mdp, const StationaryPolicy& policy);

}  // namespace mdpsynth
