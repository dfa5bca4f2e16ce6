#include "mdpsynth/report.hpp"

#include <sstream>

#include "json.hpp"
#include "mdpsynth/discount.hpp"
#include "mdpsynth/mdp_io.hpp"
#include "mdpsynth/reachability.hpp"

namespace mdpsynth {

std::string report_to_json(const Mdp& mdp, const SynthesisReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["reach"] = report.reach;
  j["cost"] = report.cost;
  if (report.surrogate_cost) j["surrogate_cost"] = *report.surrogate_cost;
  if (report.infimum) j["infimum"] = *report.infimum;
  j["bounds"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.bounds) j["bounds"][key] = value;
  j["stats"] = {{"lp_iterations", report.stats.lp_iterations},
                {"milp_nodes", report.stats.milp_nodes},
                {"milp_gap", report.stats.milp_gap},
                {"timed_out", report.stats.timed_out}};
  j["wall_ms"] = report.wall_ms;
  j["diagnostics"] = report.diagnostics;
  nlohmann::ordered_json policy = nlohmann::ordered_json::object();
  for (int s = 0; s < mdp.num_states(); ++s) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (report.policy.prob[s][a] != 0.0)
        row[mdp.actions[s][a].name] = report.policy.prob[s][a];
    policy[mdp.state_names[s]] = std::move(row);
  }
  j["policy"] = std::move(policy);
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Mdp& mdp, const SynthesisReport& report) {
  const ReachAnalysis ra = max_reach(mdp);
  const DiscountAnalysis da = optimal_values(cleanup(mdp, ra));
  std::ostringstream out;
  out << "state,x,tmin,y,action,prob\n";
  for (int s = 0; s < mdp.num_states(); ++s) {
    int best = 0;
    for (int a = 1; a < mdp.num_actions(s); ++a)
      if (report.policy.prob[s][a] > report.policy.prob[s][best]) best = a;
    out << mdp.state_names[s] << "," << format_double(ra.x[s]) << ","
        << ra.partition.tmin[s] << "," << format_double(da.y[s]) << ","
        << mdp.actions[s][best].name << ","
        << format_double(report.policy.prob[s][best]) << "\n";
  }
  return out.str();
}

}  // namespace mdpsynth
