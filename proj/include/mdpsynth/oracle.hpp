#pragma once

#include <cstddef>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

struct OracleEntry {
  std::vector<int> choice;  // action index per state
  double reach = 0.0;
  double cost = 0.0;
  bool feasible = false;  // reach matches x(s1) within 1e-7
};

struct OracleResult {
  double x_initial = 0.0;
  double best_cost = 0.0;
  std::vector<int> best_choice;
  std::vector<OracleEntry> table;
};

/// Reference answer by exhaustive enumeration of deterministic policies with
/// exact evaluation of reach and cost for each. Guard: the policy count must
/// not exceed max_policies (default 1e6); throws otherwise.
OracleResult brute_force_oracle(const Mdp& mdp,
                                std::size_t max_policies = 1000000);

}  // namespace mdpsynth
