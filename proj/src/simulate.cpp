#include "mdpsynth/simulate.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mdpsynth/mdp_io.hpp"

namespace mdpsynth {

namespace {

struct Episode {
  bool reached = false;
  int steps = 0;  // steps until the first target visit; horizon if never
  double cost = 0.0;
};

std::vector<Episode> run_episodes(const Mdp& mdp,
                                  const StationaryPolicy& policy,
                                  const SimulationOptions& options) {
  require_policy_shape(mdp, policy);
  if (options.episodes <= 0) throw std::runtime_error("episodes must be > 0");
  if (options.horizon <= 0) throw std::runtime_error("horizon must be > 0");

  const int n = mdp.num_states();
  // Expected one-step cost and absorption test let episodes stop early once
  // no further cost or target entry is possible.
  std::vector<double> step_cost(n, 0.0);
  std::vector<char> absorbing(n, 1);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const double w = policy.prob[s][a];
      if (w == 0.0) continue;
      step_cost[s] += w * mdp.actions[s][a].cost;
      for (const auto& [next, p] : mdp.actions[s][a].transitions)
        if (p > 0.0 && next != s) absorbing[s] = 0;
    }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Episode> episodes;
  episodes.reserve(static_cast<std::size_t>(options.episodes));
  for (long e = 0; e < options.episodes; ++e) {
    Episode ep;
    ep.steps = options.horizon;
    int s = mdp.initial;
    double disc = 1.0;
    if (mdp.is_target(s)) {
      ep.reached = true;
      ep.steps = 0;
    }
    for (int t = 0; t < options.horizon; ++t) {
      if (absorbing[s] && step_cost[s] == 0.0) break;
      // Sample an action, pay its cost, then sample the successor.
      double u = unit(rng);
      int a = mdp.num_actions(s) - 1;
      for (int i = 0; i < mdp.num_actions(s); ++i) {
        u -= policy.prob[s][i];
        if (u < 0.0) {
          a = i;
          break;
        }
      }
      ep.cost += disc * mdp.actions[s][a].cost;
      disc *= mdp.discount;
      double v = unit(rng);
      int next = s;
      for (const auto& [cand, p] : mdp.actions[s][a].transitions) {
        v -= p;
        if (v < 0.0) {
          next = cand;
          break;
        }
      }
      s = next;
      if (!ep.reached && mdp.is_target(s)) {
        ep.reached = true;
        ep.steps = t + 1;
      }
    }
    episodes.push_back(ep);
  }
  return episodes;
}

}  // namespace

SimulationResult simulate(const Mdp& mdp, const StationaryPolicy& policy,
                          const SimulationOptions& options) {
  const std::vector<Episode> episodes = run_episodes(mdp, policy, options);
  const double n = static_cast<double>(episodes.size());

  SimulationResult result;
  result.episodes = static_cast<long>(episodes.size());
  result.horizon = options.horizon;
  double cost_sum = 0.0, cost_sq = 0.0, hits = 0.0;
  for (const Episode& ep : episodes) {
    hits += ep.reached ? 1.0 : 0.0;
    cost_sum += ep.cost;
    cost_sq += ep.cost * ep.cost;
  }
  result.reach_estimate = hits / n;
  result.reach_stderr =
      std::sqrt(std::max(0.0, result.reach_estimate *
                                  (1.0 - result.reach_estimate) / n));
  result.cost_estimate = cost_sum / n;
  const double var =
      std::max(0.0, (cost_sq - cost_sum * cost_sum / n) / std::max(1.0, n - 1));
  result.cost_stderr = std::sqrt(var / n);

  double cmax = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s)
    for (const auto& act : mdp.actions[s]) cmax = std::max(cmax, act.cost);
  result.tail_bound = std::pow(mdp.discount, options.horizon) * cmax /
                      (1.0 - mdp.discount);
  return result;
}

std::string simulate_csv(const Mdp& mdp, const StationaryPolicy& policy,
                         const SimulationOptions& options) {
  const std::vector<Episode> episodes = run_episodes(mdp, policy, options);
  std::ostringstream out;
  out << "episode,reached,steps,discounted_cost\n";
  for (std::size_t i = 0; i < episodes.size(); ++i)
    out << i << "," << (episodes[i].reached ? 1 : 0) << ","
        << episodes[i].steps << "," << format_double(episodes[i].cost) << "\n";
  return out.str();
}

std::vector<int> most_likely_trajectory(const Mdp& mdp,
                                        const StationaryPolicy& policy,
                                        int max_steps) {
  const InducedChain chain = induced_chain(mdp, policy);
  std::vector<char> visited(mdp.num_states(), 0);
  std::vector<int> seq{mdp.initial};
  visited[mdp.initial] = 1;
  int s = mdp.initial;
  for (int t = 0; t < max_steps && !mdp.is_target(s); ++t) {
    int best = 0;
    for (int cand = 1; cand < mdp.num_states(); ++cand)
      if (chain.p(s, cand) > chain.p(s, best)) best = cand;
    seq.push_back(best);
    if (visited[best]) break;
    visited[best] = 1;
    s = best;
  }
  return seq;
}

}  // namespace mdpsynth
