#pragma once

#include <Eigen/Dense>

#include "mdpsynth/discount.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/reachability.hpp"
#include "mdpsynth/report.hpp"

namespace mdpsynth {

/// Perturbation certificate around pitilde on the cleaned-up MDP: the rank
/// data (m_mat, v_vec) describing how the induced chain moves as mass
/// eps_prime shifts from the active optimal actions onto the passive ones,
/// plus the two rates whose sum converts eps_prime into a cost increase:
///   J(perturbed) = J(pitilde) + eps_prime * (gamma1 + gamma2).
struct Perturbation {
  double eps_prime = 0.0;
  StationaryPolicy policy;  // on the cleaned-up MDP
  Eigen::MatrixXd m_mat;
  Eigen::VectorXd v_vec;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Largest admissible eps_prime: the value at which some active action's
/// probability reaches zero (+inf when no state has passive actions).
double max_eps_prime(const Mdp& mprime, const ReachAnalysis& analysis,
                     const StationaryPolicy& pitilde);

/// Shifts probability eps_prime onto each passive action of amax(s) and
/// reduces the active ones uniformly, at Sr states only. Requires
/// 0 < eps_prime <= max_eps_prime.
StationaryPolicy perturb_policy(const Mdp& mprime,
                                const ReachAnalysis& analysis,
                                const StationaryPolicy& pitilde,
                                double eps_prime);

/// Builds the perturbed policy and certifies the exact cost increase; the
/// closed-form identity above is re-checked to 1e-6 before returning.
Perturbation perturbation_certificate(const Mdp& mprime,
                                      const ReachAnalysis& analysis,
                                      const StationaryPolicy& pitilde,
                                      double eps_prime);

/// Full pipeline: max-reach, cleanup, discounted optimum, then a
/// guess-and-verify loop on eps_prime (start at the admissible bound, halve
/// until eps_prime*(gamma1+gamma2) <= eps and the perturbed policy's exact
/// reach matches x(s1); at most 128 halvings). Returns the perturbed policy
/// lifted to the input MDP with J <= y(s1) + eps certified. When pitilde
/// itself already attains x(s1) it is returned unperturbed.
SynthesisReport synth_eps_optimal(const Mdp& mdp, double eps);

}  // namespace mdpsynth
