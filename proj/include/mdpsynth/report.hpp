#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

struct SolverStats {
  long lp_iterations = 0;
  long milp_nodes = 0;
  double milp_gap = 0.0;
  bool timed_out = false;
};

/// Common result of every synthesis entry point. `reach` and `cost` are
/// always recomputed exactly from the returned policy before the report is
/// handed out, never copied from solver internals.
struct SynthesisReport {
  std::string method;
  StationaryPolicy policy;
  double reach = 0.0;
  double cost = 0.0;
  std::optional<double> surrogate_cost;
  std::optional<double> infimum;  // y(s1) when the pipeline computes it
  std::map<std::string, double> bounds;
  double wall_ms = 0.0;
  SolverStats stats;
  std::vector<std::string> diagnostics;
};

std::string report_to_json(const Mdp& mdp, const SynthesisReport& report);

/// Per-state synthesis table (x, tmin, y, chosen action) as CSV.
std::string report_to_csv(const Mdp& mdp, const SynthesisReport& report);

}  // namespace mdpsynth
