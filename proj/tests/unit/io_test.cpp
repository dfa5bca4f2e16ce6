#include "mdpsynth/mdp_io.hpp"

#include <cstdio>
#include <string>

#include "doctest.h"
#include "support/golden.hpp"

using namespace mdpsynth;

TEST_CASE("mdp text: serialize/parse round-trip preserves everything") {
  const Mdp original = golden::twopath();
  const std::string text = serialize_mdp_document(document_from_mdp(original));
  const Mdp parsed = mdp_from_document(parse_mdp_document(text));

  CHECK(parsed.state_names == original.state_names);
  CHECK(parsed.initial == original.initial);
  CHECK(parsed.targets == original.targets);
  CHECK(parsed.discount == original.discount);  // bit-exact via format_double
  REQUIRE(parsed.num_pairs() == original.num_pairs());
  for (int s = 0; s < original.num_states(); ++s)
    for (int a = 0; a < original.num_actions(s); ++a) {
      CHECK(parsed.actions[s][a].name == original.actions[s][a].name);
      CHECK(parsed.actions[s][a].cost == original.actions[s][a].cost);
      CHECK(parsed.actions[s][a].transitions ==
            original.actions[s][a].transitions);
    }
  // Serializing again reproduces the same text.
  CHECK(serialize_mdp_document(document_from_mdp(parsed)) == text);
}

TEST_CASE("mdp text: omitted cost defaults to zero") {
  const std::string text =
      "mdp 1\n"
      "discount 0.5\n"
      "initial a\n"
      "targets b\n"
      "state a\n"
      "  action go\n"
      "    -> b 1\n"
      "state b\n"
      "  action stay\n"
      "    -> b 1\n";
  const Mdp mdp = mdp_from_document(parse_mdp_document(text));
  CHECK(mdp.actions[0][0].cost == 0.0);
  CHECK(mdp.num_states() == 2);
}

TEST_CASE("mdp text: diagnostics carry line numbers") {
  const std::string bad =
      "mdp 1\n"
      "discount 0.5\n"
      "initial a\n"
      "targets b\n"
      "banana split\n";
  try {
    parse_mdp_document(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& err) {
    const std::string msg = err.what();
    CHECK(msg.find("line 5:") != std::string::npos);
    CHECK(msg.find("banana") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_mdp_document("nonsense\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_mdp_document("mdp 1\ndiscount 0.5\ninitial a\n"),
                  std::runtime_error);
}

TEST_CASE("mdp text: unknown state references are role-tagged") {
  const std::string text =
      "mdp 1\n"
      "discount 0.5\n"
      "initial zz\n"
      "targets b\n"
      "state a\n"
      "  action go\n"
      "    -> b 1\n"
      "state b\n"
      "  action stay\n"
      "    -> b 1\n";
  try {
    mdp_from_document(parse_mdp_document(text));
    FAIL("expected an unknown-state error");
  } catch (const std::runtime_error& err) {
    const std::string msg = err.what();
    CHECK(msg.find("initial") != std::string::npos);
    CHECK(msg.find("zz") != std::string::npos);
  }
}

TEST_CASE("policy text: round-trip with randomization") {
  const Mdp mdp = golden::twopath();
  StationaryPolicy policy;
  policy.prob = {{0.875, 0.125}, {1.0}, {1.0}};
  const std::string text = serialize_policy(mdp, policy);
  const StationaryPolicy parsed = parse_policy(text, mdp);
  CHECK(parsed.prob[0][0] == 0.875);
  CHECK(parsed.prob[0][1] == 0.125);
  CHECK(parsed.prob[1][0] == 1.0);
}

TEST_CASE("policy text: omissions and bad sums are rejected") {
  const Mdp mdp = golden::twopath();
  CHECK_THROWS_AS(parse_policy("policy 1\nstate s1\n  a 1\n", mdp),
                  std::runtime_error);  // s2, t missing
  const std::string bad_sum =
      "policy 1\nstate s1\n  a 0.7\nstate s2\n  c 1\nstate t\n  stay 1\n";
  CHECK_THROWS_AS(parse_policy(bad_sum, mdp), std::runtime_error);
  // Omitted actions default to probability zero.
  const std::string ok =
      "policy 1\nstate s1\n  b 1\nstate s2\n  c 1\nstate t\n  stay 1\n";
  const StationaryPolicy parsed = parse_policy(ok, mdp);
  CHECK(parsed.prob[0][0] == 0.0);
  CHECK(parsed.prob[0][1] == 1.0);
}

TEST_CASE("format_double round-trips exactly") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-9, 17.0, 0.0, 123456.789}) {
    CAPTURE(v);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("mdp files: save, load and path-tagged failures") {
  const std::string path = "io_test_roundtrip.mdp";
  const Mdp mdp = golden::fig1();
  save_mdp_file(path, mdp);
  const Mdp loaded = load_mdp_file(path);
  CHECK(serialize_mdp_document(document_from_mdp(loaded)) ==
        serialize_mdp_document(document_from_mdp(mdp)));
  std::remove(path.c_str());

  try {
    load_mdp_file("does_not_exist.mdp");
    FAIL("expected a load error");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("does_not_exist.mdp") !=
          std::string::npos);
  }
}
