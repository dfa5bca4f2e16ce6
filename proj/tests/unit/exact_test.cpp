#include "mdpsynth/exact_milp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "mdpsynth/oracle.hpp"
#include "support/golden.hpp"

using namespace mdpsynth;

TEST_CASE("big_m: certified exactly for deterministic transitions") {
  const BigM det = big_m(golden::fig1());
  CHECK(det.value == doctest::Approx(2.0));
  CHECK(det.certified);

  Mdp stochastic = golden::twopath();
  stochastic.actions[0][0].transitions = {{2, 0.5}, {1, 0.5}};
  const BigM heur = big_m(stochastic, 100.0);
  CHECK(heur.value == doctest::Approx(300.0));
  CHECK(!heur.certified);
  CHECK(!heur.note.empty());
}

TEST_CASE("build_milp: one binary per pair and the right reach target") {
  const Mdp mdp = golden::twopath();
  const ReachAnalysis ra = max_reach(mdp);
  const MilpModel model = build_milp(mdp, ra, 3.0);
  int binaries = 0;
  for (char b : model.mip.binary) binaries += b ? 1 : 0;
  CHECK(binaries == mdp.num_pairs());
  CHECK(model.reach_target == doctest::Approx(1.0));
  CHECK(model.reward[0][0] == doctest::Approx(1.0));  // a jumps straight to t
  CHECK(model.reward[0][1] == doctest::Approx(0.0));
  CHECK(model.reward[1][0] == doctest::Approx(1.0));
  CHECK(model.big_m == doctest::Approx(3.0));
}

TEST_CASE("solve_exact: detour is the deterministic optimum") {
  const Mdp mdp = golden::twopath();
  const SynthesisReport report = solve_exact(mdp);
  CHECK(report.reach == doctest::Approx(1.0));
  CHECK(report.cost == doctest::Approx(1.5));
  CHECK(report.policy.choices() == std::vector<int>{1, 0, 0});
  CHECK(report.bounds.at("x_initial") == doctest::Approx(1.0));
  CHECK(report.bounds.at("milp_objective") == doctest::Approx(1.5));
  CHECK(!report.stats.timed_out);
}

TEST_CASE("solve_exact: only the paid step is feasible on loop-or-go") {
  const SynthesisReport report = solve_exact(golden::fig1());
  CHECK(report.reach == doctest::Approx(1.0));
  CHECK(report.cost == doctest::Approx(1.0));
  CHECK(report.policy.choices() == std::vector<int>{1, 0});
}

TEST_CASE("solve_exact: initial state inside the target set") {
  Mdp mdp;
  mdp.state_names = {"t", "u"};
  mdp.initial = 0;
  mdp.targets = {0};
  mdp.discount = 0.5;
  mdp.actions.resize(2);
  mdp.actions[0] = {ActionSpec{"stay", 0.0, {{0, 1.0}}}};
  mdp.actions[1] = {ActionSpec{"go", 1.0, {{0, 1.0}}}};
  const SynthesisReport report = solve_exact(mdp);
  CHECK(report.reach == doctest::Approx(1.0));
  CHECK(report.cost == doctest::Approx(0.0));
  REQUIRE(!report.diagnostics.empty());
  CHECK(report.diagnostics[0].find("target") != std::string::npos);
}

TEST_CASE("solve_exact: matches the brute-force oracle on random instances") {
  std::mt19937_64 rng(406);
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    const bool deterministic = trial < 10;
    const Mdp mdp = golden::random_exact_instance(rng, deterministic);
    const OracleResult oracle = brute_force_oracle(mdp);
    const SynthesisReport report = solve_exact(mdp);
    CHECK(std::abs(report.cost - oracle.best_cost) <= 1e-5);
    CHECK(std::abs(report.reach - oracle.x_initial) <= 1e-6);
    CHECK(report.policy.is_deterministic());
  }
}

TEST_CASE("oracle: full table on the two-route instance") {
  const OracleResult oracle = brute_force_oracle(golden::twopath());
  CHECK(oracle.x_initial == doctest::Approx(1.0));
  CHECK(oracle.best_cost == doctest::Approx(1.5));
  CHECK(oracle.best_choice == std::vector<int>{1, 0, 0});
  REQUIRE(oracle.table.size() == 2);
  for (const OracleEntry& entry : oracle.table) {
    CHECK(entry.feasible);
    CHECK(entry.reach == doctest::Approx(1.0));
  }
}

TEST_CASE("oracle: policy-count guard") {
  CHECK_THROWS_AS(brute_force_oracle(golden::twopath(), 1),
                  std::runtime_error);
}
