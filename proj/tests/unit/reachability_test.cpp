#include "mdpsynth/reachability.hpp"

#include <vector>

#include "doctest.h"
#include "support/golden.hpp"

using namespace mdpsynth;

namespace {

// s1 chooses between a sure step to the target and a step into a dead end.
Mdp dead_end_mdp() {
  Mdp mdp;
  mdp.state_names = {"s1", "dead", "t"};
  mdp.initial = 0;
  mdp.targets = {2};
  mdp.discount = 0.5;
  mdp.actions.resize(3);
  mdp.actions[0] = {ActionSpec{"a", 1.0, {{2, 1.0}}},
                    ActionSpec{"b", 0.5, {{1, 1.0}}}};
  mdp.actions[1] = {ActionSpec{"loop", 0.0, {{1, 1.0}}}};
  mdp.actions[2] = {ActionSpec{"stay", 0.0, {{2, 1.0}}}};
  return mdp;
}

// Action p risks a dead end, action q retries in place: only q is optimal.
Mdp retry_mdp() {
  Mdp mdp;
  mdp.state_names = {"s1", "dead", "t"};
  mdp.initial = 0;
  mdp.targets = {2};
  mdp.discount = 0.5;
  mdp.actions.resize(3);
  mdp.actions[0] = {ActionSpec{"p", 1.0, {{2, 0.5}, {1, 0.5}}},
                    ActionSpec{"q", 1.0, {{2, 0.3}, {0, 0.7}}}};
  mdp.actions[1] = {ActionSpec{"loop", 0.0, {{1, 1.0}}}};
  mdp.actions[2] = {ActionSpec{"stay", 0.0, {{2, 1.0}}}};
  return mdp;
}

}  // namespace

TEST_CASE("max_reach: both actions maximize on the loop-or-go instance") {
  const Mdp mdp = golden::fig1();
  const ReachAnalysis ra = max_reach(mdp);
  CHECK(ra.x[0] == doctest::Approx(1.0));
  CHECK(ra.x[1] == doctest::Approx(1.0));
  CHECK(ra.amax[0] == std::vector<int>{0, 1});
  CHECK(ra.amax[1] == std::vector<int>{0});
  CHECK(ra.partition.rest == std::vector<int>{0});
  CHECK(ra.partition.targets == std::vector<int>{1});
  CHECK(ra.partition.zero.empty());
}

TEST_CASE("max_reach: two disjoint sure routes") {
  const ReachAnalysis ra = max_reach(golden::twopath());
  CHECK(ra.x == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(ra.amax[0] == std::vector<int>{0, 1});
  CHECK(ra.amax[1] == std::vector<int>{0});
}

TEST_CASE("max_reach: dead-end action is excluded from amax") {
  const Mdp mdp = dead_end_mdp();
  const ReachAnalysis ra = max_reach(mdp);
  CHECK(ra.x[0] == doctest::Approx(1.0));
  CHECK(ra.x[1] == doctest::Approx(0.0));
  CHECK(ra.amax[0] == std::vector<int>{0});
  CHECK(ra.partition.zero == std::vector<int>{1});

  const Mdp cleaned = cleanup(mdp, ra);
  CHECK(cleaned.num_pairs() == 3);  // s1 loses b; dead and t keep theirs
  CHECK(cleaned.actions[0].size() == 1);
  CHECK(cleaned.actions[0][0].name == "a");
  CHECK(cleaned.state_names == mdp.state_names);
  CHECK(cleaned.actions[1].size() == 1);
}

TEST_CASE("max_reach: retry action beats the risky one") {
  const ReachAnalysis ra = max_reach(retry_mdp());
  CHECK(ra.x[0] == doctest::Approx(1.0));
  CHECK(ra.amax[0] == std::vector<int>{1});
}

TEST_CASE("reach_prob: matches hand values") {
  const Mdp fig1 = golden::fig1();
  CHECK(reach_prob(fig1, StationaryPolicy::pure(fig1, {0, 0})) ==
        doctest::Approx(0.0));
  CHECK(reach_prob(fig1, StationaryPolicy::pure(fig1, {1, 0})) ==
        doctest::Approx(1.0));
  CHECK(reach_prob(fig1, golden::fig1_delta_policy(fig1, 0.25)) ==
        doctest::Approx(1.0));

  const Mdp two = golden::twopath();
  CHECK(reach_prob(two, StationaryPolicy::pure(two, {0, 0, 0})) ==
        doctest::Approx(1.0));
  CHECK(reach_prob(two, StationaryPolicy::pure(two, {1, 0, 0})) ==
        doctest::Approx(1.0));

  const Mdp retry = retry_mdp();
  CHECK(reach_prob(retry, StationaryPolicy::pure(retry, {0, 0, 0})) ==
        doctest::Approx(0.5));
  CHECK(reach_prob(retry, StationaryPolicy::pure(retry, {1, 0, 0})) ==
        doctest::Approx(1.0));
}

TEST_CASE("reach_prob and max_reach when the initial state is a target") {
  Mdp mdp;
  mdp.state_names = {"t"};
  mdp.initial = 0;
  mdp.targets = {0};
  mdp.discount = 0.5;
  mdp.actions = {{ActionSpec{"stay", 0.0, {{0, 1.0}}}}};
  CHECK(reach_prob(mdp, StationaryPolicy::pure(mdp, {0})) == 1.0);
  const ReachAnalysis ra = max_reach(mdp);
  CHECK(ra.x[0] == 1.0);
  CHECK(ra.partition.rest.empty());
}
