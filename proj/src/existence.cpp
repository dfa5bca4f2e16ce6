#include "mdpsynth/existence.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mdpsynth/discount.hpp"
#include "mdpsynth/reachability.hpp"

namespace mdpsynth {

namespace {

constexpr double kExistTol = 1e-6;
constexpr int kInfinite = std::numeric_limits<int>::max();

// Hop counts to the target set over the support graph of `mdp`.
std::vector<int> distance_to_targets(const Mdp& mdp) {
  const int n = mdp.num_states();
  std::vector<std::vector<int>> predecessors(n);
  for (int s = 0; s < n; ++s)
    for (const auto& act : mdp.actions[s])
      for (const auto& [next, p] : act.transitions)
        if (p > 0.0 && next != s) predecessors[next].push_back(s);

  std::vector<int> dist(n, kInfinite);
  std::deque<int> queue;
  for (int t : mdp.targets) {
    dist[t] = 0;
    queue.push_back(t);
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int pred : predecessors[s])
      if (dist[pred] == kInfinite) {
        dist[pred] = dist[s] + 1;
        queue.push_back(pred);
      }
  }
  return dist;
}

}  // namespace

ExistenceCertificate check_existence(const Mdp& mdp) {
  const ReachAnalysis ra = max_reach(mdp);
  const Mdp mprime = cleanup(mdp, ra);
  const DiscountAnalysis da = optimal_values(mprime);
  const Mdp mbar = modified_mdp(mprime, da);
  const ReachAnalysis rabar = max_reach(mbar);

  ExistenceCertificate cert;
  cert.x_initial = ra.x[mdp.initial];
  cert.xbar_initial = rabar.x[mdp.initial];
  cert.xbar = rabar.x;
  cert.infimum = da.y[mdp.initial];
  cert.exists = std::abs(cert.xbar_initial - cert.x_initial) <= kExistTol;

  if (!cert.exists) {
    std::ostringstream note;
    note << "restricting to cost-optimal actions drops the attainable reach "
            "probability from "
         << cert.x_initial << " to " << cert.xbar_initial;
    cert.diagnostics.push_back(note.str());
    return cert;
  }

  // Witness: keep only the actions that preserve xbar, then steer along
  // shortest paths to the target set.
  const Mdp pruned = cleanup(mbar, rabar);
  const std::vector<int> dist = distance_to_targets(pruned);
  std::vector<int> choice(mdp.num_states(), 0);
  for (int s : rabar.partition.rest) {
    if (dist[s] == kInfinite)
      throw std::runtime_error(
          "check_existence: state " + mdp.state_names[s] +
          " lost its target path after pruning (unexpected)");
    int chosen = -1;
    for (int a = 0; a < pruned.num_actions(s) && chosen < 0; ++a)
      for (const auto& [next, p] : pruned.actions[s][a].transitions)
        if (p > 0.0 && dist[next] < dist[s]) {
          chosen = a;
          break;
        }
    if (chosen < 0)
      throw std::runtime_error(
          "check_existence: no progressing action at state " +
          mdp.state_names[s]);
    choice[s] = chosen;
  }
  const StationaryPolicy witness = lift_policy(
      pruned, mdp, StationaryPolicy::pure(pruned, choice));

  const double reach = reach_prob(mdp, witness);
  const double cost = evaluate_cost(mdp, witness);
  if (std::abs(reach - cert.x_initial) > kExistTol ||
      std::abs(cost - cert.infimum) > kExistTol) {
    std::ostringstream note;
    note << "witness re-verification failed: reach " << reach << " vs "
         << cert.x_initial << ", cost " << cost << " vs " << cert.infimum;
    throw std::runtime_error("check_existence: " + note.str());
  }
  cert.witness = witness;
  return cert;
}

}  // namespace mdpsynth
