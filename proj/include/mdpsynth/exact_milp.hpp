#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mdpsynth/linprog.hpp"
#include "mdpsynth/mdp.hpp"
#include "mdpsynth/reachability.hpp"
#include "mdpsynth/report.hpp"

namespace mdpsynth {

/// Big-M constant for the occupation-measure MILP. `certified` is true only
/// for deterministic-transition MDPs, where |S| bounds the expected number of
/// steps spent in Sr; otherwise the k*|S| surrogate is a heuristic and the
/// note records that correctness requires M to dominate the true bound.
struct BigM {
  double value = 0.0;
  bool certified = false;
  std::string note;
};

BigM big_m(const Mdp& mdp, double k = 100.0);

/// The deterministic-synthesis MILP over discounted (lambda1) and
/// undiscounted (lambda2) occupation measures linked by per-pair selector
/// binaries: discounted balance rows for every state, undiscounted balance
/// rows on Sr (lambda2 fixed to zero elsewhere), the reach row
/// sum lambda2*r == x(s1), the linking rows lambda/M <= delta and the
/// one-action-per-state rows sum_a delta <= 1.
struct MilpModel {
  MixedIntegerProgram mip;
  std::vector<int> lambda1_base;  // per state: first lambda1 var id
  std::vector<int> lambda2_base;
  std::vector<int> delta_base;
  std::vector<std::vector<double>> reward;  // r(s,a): one-step mass into B
  double big_m = 0.0;
  double reach_target = 0.0;  // x(s1)

  int lambda1(int s, int a) const { return lambda1_base[s] + a; }
  int lambda2(int s, int a) const { return lambda2_base[s] + a; }
  int delta(int s, int a) const { return delta_base[s] + a; }
};

MilpModel build_milp(const Mdp& mdp, const ReachAnalysis& analysis,
                     double big_m);

/// Exact deterministic synthesis: solves the MILP and extracts the policy
/// from the selector binaries (lowest-index action where none is selected).
/// reach and cost in the report are recomputed exactly from the policy. On
/// timeout the incumbent policy is returned with stats.timed_out set and the
/// proven bound in bounds["best_bound"].
SynthesisReport solve_exact(
    const Mdp& mdp, double k = 100.0,
    double time_limit_sec = std::numeric_limits<double>::infinity());

}  // namespace mdpsynth
