#include "mdpsynth/epsilon_synthesis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mdpsynth {

namespace {

constexpr double kReachMatchTol = 1e-6;

struct SplitRow {
  std::vector<int> active;
  std::vector<int> passive;
};

SplitRow split_actions(const Mdp& mprime, const StationaryPolicy& pitilde,
                       int s) {
  SplitRow row;
  for (int a = 0; a < mprime.num_actions(s); ++a) {
    if (pitilde.prob[s][a] > 0.0)
      row.active.push_back(a);
    else
      row.passive.push_back(a);
  }
  return row;
}

}  // namespace

double max_eps_prime(const Mdp& mprime, const ReachAnalysis& analysis,
                     const StationaryPolicy& pitilde) {
  require_policy_shape(mprime, pitilde);
  double bound = std::numeric_limits<double>::infinity();
  for (int s : analysis.partition.rest) {
    const SplitRow row = split_actions(mprime, pitilde, s);
    if (row.passive.empty()) continue;
    const double ratio =
        static_cast<double>(row.passive.size()) / row.active.size();
    for (int a : row.active)
      bound = std::min(bound, pitilde.prob[s][a] / ratio);
  }
  return bound;
}

StationaryPolicy perturb_policy(const Mdp& mprime,
                                const ReachAnalysis& analysis,
                                const StationaryPolicy& pitilde,
                                double eps_prime) {
  require_policy_shape(mprime, pitilde);
  if (!(eps_prime > 0.0))
    throw std::invalid_argument("perturb_policy: eps_prime must be positive");
  if (eps_prime > max_eps_prime(mprime, analysis, pitilde) + 1e-12)
    throw std::invalid_argument(
        "perturb_policy: eps_prime exceeds the admissible bound");

  StationaryPolicy perturbed = pitilde;
  for (int s : analysis.partition.rest) {
    const SplitRow row = split_actions(mprime, pitilde, s);
    if (row.passive.empty()) continue;
    const double ratio =
        static_cast<double>(row.passive.size()) / row.active.size();
    for (int a : row.passive) perturbed.prob[s][a] = eps_prime;
    for (int a : row.active)
      perturbed.prob[s][a] =
          std::max(0.0, pitilde.prob[s][a] - eps_prime * ratio);
  }
  require_policy_shape(mprime, perturbed);
  return perturbed;
}

Perturbation perturbation_certificate(const Mdp& mprime,
                                      const ReachAnalysis& analysis,
                                      const StationaryPolicy& pitilde,
                                      double eps_prime) {
  const int n = mprime.num_states();
  const double beta = mprime.discount;

  Perturbation cert;
  cert.eps_prime = eps_prime;
  cert.policy = perturb_policy(mprime, analysis, pitilde, eps_prime);
  cert.m_mat = Eigen::MatrixXd::Zero(n, n);
  cert.v_vec = Eigen::VectorXd::Zero(n);

  for (int s : analysis.partition.rest) {
    const SplitRow row = split_actions(mprime, pitilde, s);
    if (row.passive.empty()) continue;
    const double ratio =
        static_cast<double>(row.passive.size()) / row.active.size();
    for (int a : row.passive) {
      cert.v_vec[s] += mprime.actions[s][a].cost;
      for (const auto& [next, p] : mprime.actions[s][a].transitions)
        cert.m_mat(s, next) += p;
    }
    for (int a : row.active) {
      cert.v_vec[s] -= ratio * mprime.actions[s][a].cost;
      for (const auto& [next, p] : mprime.actions[s][a].transitions)
        cert.m_mat(s, next) -= ratio * p;
    }
  }

  const InducedChain before = induced_chain(mprime, pitilde);
  const InducedChain after = induced_chain(mprime, cert.policy);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd sys_before = eye - beta * before.p;
  const Eigen::MatrixXd sys_after = eye - beta * after.p;

  const Eigen::VectorXd row_before =
      sys_before.transpose().partialPivLu().solve(before.alpha);
  const Eigen::VectorXd row_after =
      sys_after.transpose().partialPivLu().solve(before.alpha);
  const Eigen::VectorXd w = sys_after.partialPivLu().solve(before.cost);

  cert.gamma1 = beta * row_before.dot(cert.m_mat * w);
  cert.gamma2 = row_after.dot(cert.v_vec);

  // The exact-increase identity must hold; it is the whole point of the
  // certificate.
  const double j_before = row_before.dot(before.cost);
  const Eigen::VectorXd u_after = sys_after.partialPivLu().solve(after.cost);
  const double j_after = before.alpha.dot(u_after);
  const double predicted = eps_prime * (cert.gamma1 + cert.gamma2);
  if (std::abs((j_after - j_before) - predicted) >
      1e-6 * std::max(1.0, std::abs(j_after)))
    throw std::runtime_error(
        "perturbation_certificate: rate identity violated");
  return cert;
}

SynthesisReport synth_eps_optimal(const Mdp& mdp, double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("synth_eps_optimal: eps must be positive");
  const auto started = std::chrono::steady_clock::now();

  const ReachAnalysis ra = max_reach(mdp);
  const Mdp mprime = cleanup(mdp, ra);
  const DiscountAnalysis da = optimal_values(mprime);
  const double x_initial = ra.x[mdp.initial];
  const double y_initial = da.y[mdp.initial];

  SynthesisReport report;
  report.method = "eps";
  report.infimum = y_initial;
  report.stats.lp_iterations = ra.lp_iterations;
  report.bounds["eps"] = eps;
  report.bounds["x_initial"] = x_initial;
  report.bounds["cost_bound"] = y_initial + eps;

  const StationaryPolicy unperturbed = lift_policy(mprime, mdp, da.pitilde);
  const double plain_reach = reach_prob(mdp, unperturbed);
  if (std::abs(plain_reach - x_initial) <= 1e-9) {
    report.policy = unperturbed;
    report.reach = plain_reach;
    report.cost = evaluate_cost(mdp, unperturbed);
    report.bounds["eps_prime"] = 0.0;
    report.diagnostics.push_back(
        "cost-optimal policy already attains the maximum reach probability");
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return report;
  }

  double ep = max_eps_prime(mprime, ra, da.pitilde);
  if (!std::isfinite(ep))
    throw std::runtime_error(
        "synth_eps_optimal: no passive actions to perturb although the "
        "optimum misses the maximum reach probability");
  for (int round = 0; round < 128; ++round, ep /= 2.0) {
    const Perturbation cert =
        perturbation_certificate(mprime, ra, da.pitilde, ep);
    const double rate = cert.gamma1 + cert.gamma2;
    if (rate > 1e-12 && ep > eps / rate) continue;
    const StationaryPolicy lifted = lift_policy(mprime, mdp, cert.policy);
    const double reach = reach_prob(mdp, lifted);
    if (std::abs(reach - x_initial) > kReachMatchTol) continue;

    report.policy = lifted;
    report.reach = reach;
    report.cost = evaluate_cost(mdp, lifted);
    report.bounds["eps_prime"] = ep;
    report.bounds["gamma1"] = cert.gamma1;
    report.bounds["gamma2"] = cert.gamma2;
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return report;
  }
  throw std::runtime_error(
      "synth_eps_optimal: failed to certify a perturbation within 128 "
      "halvings");
}

}  // namespace mdpsynth
