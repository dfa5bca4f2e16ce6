#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

/// Decision of "does an optimal policy exist", with the infimum value and a
/// deterministic witness when it does.
struct ExistenceCertificate {
  bool exists = false;
  double infimum = 0.0;    // y(s1) on the cleaned-up MDP
  double x_initial = 0.0;  // best reach probability from s1
  double xbar_initial = 0.0;
  std::vector<double> xbar;  // max reach after restricting to aopt
  std::optional<StationaryPolicy> witness;  // on the input MDP
  std::vector<std::string> diagnostics;
};

/// An optimal policy exists iff restricting the cleaned-up MDP to the
/// cost-optimal actions leaves the best reach probability from s1 unchanged
/// (tolerance 1e-6). When it does, a deterministic witness is assembled by
/// keeping the actions that preserve xbar and steering along shortest paths
/// to the target set; the witness is re-verified to be reach- and
/// cost-optimal before it is returned.
ExistenceCertificate check_existence(const Mdp& mdp);

}  // namespace mdpsynth
