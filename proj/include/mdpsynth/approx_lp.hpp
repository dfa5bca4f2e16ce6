#pragma once

#include <optional>
#include <vector>

#include "mdpsynth/linprog.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/reachability.hpp"
#include "mdpsynth/report.hpp"

namespace mdpsynth {

/// Surrogate cost table ctilde(s,a) = discount^(tmin(s)-1) * c(s,a), indexed
/// like mdp.actions. Requires zero costs on targets and the zero class;
/// passing zero_terminal_costs forces them to zero instead of erroring.
/// States unreachable from s1 get ctilde = 0 (flagged in `diagnostics`).
std::vector<std::vector<double>> modified_costs(
    const Mdp& mdp, const StatePartition& partition,
    bool zero_terminal_costs = false,
    std::vector<std::string>* diagnostics = nullptr);

/// Occupation-measure LP solution over Sr pairs; lambda is indexed like
/// mdp.actions with zero rows off Sr.
struct OccupationLp {
  double value = 0.0;
  std::vector<std::vector<double>> lambda;
  long lp_iterations = 0;
};

/// First LP: minimize sum ctilde*lambda over undiscounted balance on Sr plus
/// the reach row sum lambda*r == x(s1). Returns the surrogate optimum.
OccupationLp solve_surrogate_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& ctilde);

/// Second LP: minimize total mass sum lambda subject to the same rows plus
/// sum ctilde*lambda == vstar. Its optimal support selects the policy.
OccupationLp solve_selection_lp(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& ctilde,
                                double vstar);

/// Deterministic policy from an occupation measure: the lowest-index action
/// with lambda > 1e-9 at each visited state; unvisited Sr states fall back to
/// the lowest-index amax action, other states to action 0.
StationaryPolicy extract_policy(const Mdp& mdp, const ReachAnalysis& analysis,
                                const std::vector<std::vector<double>>& lambda);

/// A-priori suboptimality data: cmin over Sr pairs, max of ctilde, the
/// minimum expected discounted Sr dwell time m_under (an LP with unit costs
/// and discounted balance rows; the discounting keeps cmin*m_under a valid
/// lower bound on J), and the big-M style upper surrogate m_upper (certified
/// only for deterministic transitions). gap_bound = m_upper*ctilde_max -
/// m_under*cmin; gap_bound_deterministic = |S|*ctilde_max when transitions
/// are deterministic.
struct ApproxCertificate {
  double cmin = 0.0;
  double ctilde_max = 0.0;
  double m_under = 0.0;
  double m_upper = 0.0;
  bool m_upper_certified = false;
  double gap_bound = 0.0;
  std::optional<double> gap_bound_deterministic;
};

ApproxCertificate suboptimality_certificate(
    const Mdp& mdp, const ReachAnalysis& analysis,
    const std::vector<std::vector<double>>& ctilde, double k = 100.0);

/// Expected undiscounted total of an arbitrary cost table under a policy,
/// from the initial state. +inf when the induced chain can stay forever in a
/// reachable positive-cost region.
double surrogate_value(const Mdp& mdp, const StationaryPolicy& policy,
                       const std::vector<std::vector<double>>& cost_table);

/// Approximation pipeline: surrogate LP, selection LP, extraction,
/// certificates. The report's surrogate_cost carries the extracted policy's
/// exact surrogate value (equal to the LP optimum).
SynthesisReport synth_approx(const Mdp& mdp, double k = 100.0,
                             bool zero_terminal_costs = false);

/// Same two-LP machinery with the raw cost table (no discount weighting):
/// minimizes the expected total undiscounted cost among reach maximizers.
SynthesisReport synth_total_cost(const Mdp& mdp,
                                 bool zero_terminal_costs = false);

/// Discounted-reachability baseline: maximize the expected discounted target
/// entry reward, then minimize expected discounted cost at that optimum, both
/// over discounted occupation measures.
SynthesisReport synth_discounted_baseline(const Mdp& mdp);

}  // namespace mdpsynth
