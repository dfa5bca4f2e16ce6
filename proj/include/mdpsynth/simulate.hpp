#pragma once

#include <cstdint>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

struct SimulationOptions {
  long episodes = 10000;
  int horizon = 1000;
  std::uint64_t seed = 0;
};

struct SimulationResult {
  double reach_estimate = 0.0;
  double reach_stderr = 0.0;
  double cost_estimate = 0.0;
  double cost_stderr = 0.0;
  /// Truncation bound on the cost estimate: discount^horizon * cmax/(1-beta).
  double tail_bound = 0.0;
  long episodes = 0;
  int horizon = 0;
};

/// Seeded Monte-Carlo rollout of a stationary policy. Episodes are sampled
/// sequentially from one mt19937_64 stream, so a rerun with the same seed is
/// bit-identical.
SimulationResult simulate(const Mdp& mdp, const StationaryPolicy& policy,
                          const SimulationOptions& options);

/// Per-episode rows (episode, reached, steps, discounted_cost) as CSV.
std::string simulate_csv(const Mdp& mdp, const StationaryPolicy& policy,
                         const SimulationOptions& options);

/// Greedy most-likely path of the induced chain from the initial state:
/// repeatedly follow the highest-probability successor (lowest id on ties)
/// until the target set, a revisit, or max_steps. Returns the state sequence.
std::vector<int> most_likely_trajectory(const Mdp& mdp,
                                        const StationaryPolicy& policy,
                                        int max_steps);

}  // namespace mdpsynth
