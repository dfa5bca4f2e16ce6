#pragma once

#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

enum class ValueBackend { kValueIteration, kLinearProgram };

/// Unconstrained discounted-cost optimum of the given MDP (usually the
/// cleaned-up one): optimal values y, per-state sets of optimal actions and
/// the lowest-index greedy deterministic policy.
struct DiscountAnalysis {
  std::vector<double> y;
  std::vector<std::vector<int>> aopt;
  StationaryPolicy pitilde;
  long iterations = 0;
};

/// Value iteration to sup-norm residual (1-beta)*tol/(2*beta) with tol=1e-10,
/// followed by an exact policy-evaluation solve for the greedy policy; the
/// kLinearProgram backend instead maximizes sum y subject to
/// y_s <= c(s,a) + beta*sum P y. Membership in aopt uses tolerance 1e-7.
DiscountAnalysis optimal_values(const Mdp& mdp,
                                ValueBackend backend =
                                    ValueBackend::kValueIteration);

/// Expected total discounted cost of a stationary policy from the initial
/// state, by solving (I - beta*P) u = c on the induced chain.
double evaluate_cost(const Mdp& mdp, const StationaryPolicy& policy);

/// Modified MDP: action sets reduced to aopt(s) at every state.
Mdp modified_mdp(const Mdp& mdp, const DiscountAnalysis& analysis);

}  // namespace mdpsynth
