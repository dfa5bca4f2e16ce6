#include "mdpsynth/discount.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "mdpsynth/linprog.hpp"

namespace mdpsynth {

namespace {

constexpr double kAoptTol = 1e-7;
constexpr double kValueTol = 1e-10;

double action_backup(const Mdp& mdp, const std::vector<double>& y, int s,
                     int a) {
  double total = mdp.actions[s][a].cost;
  for (const auto& [next, p] : mdp.actions[s][a].transitions)
    total += mdp.discount * p * y[next];
  return total;
}

std::vector<double> values_by_iteration(const Mdp& mdp, long* sweeps) {
  const int n = mdp.num_states();
  const double beta = mdp.discount;
  const double stop = (1.0 - beta) * kValueTol / (2.0 * beta);
  std::vector<double> y(n, 0.0), next(n, 0.0);
  for (long sweep = 0; sweep < 20000000L; ++sweep) {
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = action_backup(mdp, y, s, 0);
      for (int a = 1; a < mdp.num_actions(s); ++a)
        best = std::min(best, action_backup(mdp, y, s, a));
      next[s] = best;
      residual = std::max(residual, std::abs(best - y[s]));
    }
    y.swap(next);
    if (residual <= stop) {
      *sweeps = sweep + 1;
      return y;
    }
  }
  throw std::runtime_error("optimal_values: value iteration did not converge");
}

std::vector<double> values_by_lp(const Mdp& mdp, long* iterations) {
  LinearProgram lp;
  lp.sense = LpSense::kMaximize;
  for (int s = 0; s < mdp.num_states(); ++s)
    lp.add_variable("y_" + mdp.state_names[s], 1.0);
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      std::vector<std::pair<int, double>> coeffs{{s, 1.0}};
      for (const auto& [next, p] : mdp.actions[s][a].transitions) {
        if (next == s)
          coeffs[0].second -= mdp.discount * p;
        else
          coeffs.emplace_back(next, -mdp.discount * p);
      }
      lp.add_row(LpRelation::kLe, mdp.actions[s][a].cost, std::move(coeffs),
                 mdp.state_names[s] + "/" + mdp.actions[s][a].name);
    }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw std::runtime_error("optimal_values: LP backend failed (" +
                             to_string(sol.status) + ")");
  *iterations = sol.iterations;
  return sol.x;
}

}  // namespace

DiscountAnalysis optimal_values(const Mdp& mdp, ValueBackend backend) {
  require_valid(mdp);
  DiscountAnalysis analysis;
  std::vector<double> y =
      backend == ValueBackend::kValueIteration
          ? values_by_iteration(mdp, &analysis.iterations)
          : values_by_lp(mdp, &analysis.iterations);

  // Exact policy evaluation of the greedy policy pins the fixed point.
  const int n = mdp.num_states();
  std::vector<int> greedy(n, 0);
  for (int s = 0; s < n; ++s) {
    double best = action_backup(mdp, y, s, 0);
    for (int a = 1; a < mdp.num_actions(s); ++a) {
      const double q = action_backup(mdp, y, s, a);
      if (q < best) {
        best = q;
        greedy[s] = a;
      }
    }
  }
  const InducedChain chain =
      induced_chain(mdp, StationaryPolicy::pure(mdp, greedy));
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.discount * chain.p;
  const Eigen::VectorXd refined = system.partialPivLu().solve(chain.cost);
  for (int s = 0; s < n; ++s) {
    if (std::abs(refined[s] - y[s]) > 1e-6)
      throw std::runtime_error(
          "optimal_values: greedy policy evaluation drifted from the fixed "
          "point at state " +
          mdp.state_names[s]);
    y[s] = refined[s];
  }

  analysis.y = y;
  analysis.aopt.resize(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (action_backup(mdp, y, s, a) - y[s] <= kAoptTol)
        analysis.aopt[s].push_back(a);
    if (analysis.aopt[s].empty())
      throw std::runtime_error("optimal_values: empty optimal action set at " +
                               mdp.state_names[s]);
  }
  std::vector<int> choice(n);
  for (int s = 0; s < n; ++s) choice[s] = analysis.aopt[s][0];
  analysis.pitilde = StationaryPolicy::pure(mdp, choice);
  return analysis;
}

double evaluate_cost(const Mdp& mdp, const StationaryPolicy& policy) {
  const InducedChain chain = induced_chain(mdp, policy);
  const int n = mdp.num_states();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - mdp.discount * chain.p;
  const Eigen::VectorXd u = system.partialPivLu().solve(chain.cost);
  return u[mdp.initial];
}

Mdp modified_mdp(const Mdp& mdp, const DiscountAnalysis& analysis) {
  Mdp modified = mdp;
  for (int s = 0; s < mdp.num_states(); ++s) {
    std::vector<ActionSpec> kept;
    kept.reserve(analysis.aopt[s].size());
    for (int a : analysis.aopt[s]) kept.push_back(mdp.actions[s][a]);
    modified.actions[s] = std::move(kept);
  }
  require_valid(modified);
  return modified;
}

}  // namespace mdpsynth
