#include "mdpsynth/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mdpsynth/discount.hpp"
#include "mdpsynth/reachability.hpp"

namespace mdpsynth {

OracleResult brute_force_oracle(const Mdp& mdp, std::size_t max_policies) {
  require_valid(mdp);
  std::size_t count = 1;
  for (int s = 0; s < mdp.num_states(); ++s) {
    const std::size_t width = static_cast<std::size_t>(mdp.num_actions(s));
    if (count > max_policies / width) {
      std::ostringstream msg;
      msg << "brute_force_oracle: more than " << max_policies
          << " deterministic policies";
      throw std::runtime_error(msg.str());
    }
    count *= width;
  }

  OracleResult result;
  std::vector<int> choice(mdp.num_states(), 0);
  bool done = false;
  while (!done) {
    OracleEntry entry;
    entry.choice = choice;
    const StationaryPolicy policy = StationaryPolicy::pure(mdp, choice);
    entry.reach = reach_prob(mdp, policy);
    entry.cost = evaluate_cost(mdp, policy);
    result.x_initial = std::max(result.x_initial, entry.reach);
    result.table.push_back(std::move(entry));

    done = true;
    for (int s = 0; s < mdp.num_states(); ++s) {
      if (++choice[s] < mdp.num_actions(s)) {
        done = false;
        break;
      }
      choice[s] = 0;
    }
  }

  bool have_best = false;
  for (OracleEntry& entry : result.table) {
    entry.feasible = std::abs(entry.reach - result.x_initial) <= 1e-7;
    if (entry.feasible && (!have_best || entry.cost < result.best_cost)) {
      result.best_cost = entry.cost;
      result.best_choice = entry.choice;
      have_best = true;
    }
  }
  return result;
}

}  // namespace mdpsynth
