#include "mdpsynth/existence.hpp"

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "mdpsynth/discount.hpp"
#include "mdpsynth/reachability.hpp"
#include "support/golden.hpp"

using namespace mdpsynth;

TEST_CASE("check_existence: loop-or-go has no optimal policy") {
  const ExistenceCertificate cert = check_existence(golden::fig1());
  CHECK(!cert.exists);
  CHECK(cert.infimum == doctest::Approx(0.0));
  CHECK(cert.x_initial == doctest::Approx(1.0));
  CHECK(cert.xbar_initial == doctest::Approx(0.0));
  CHECK(!cert.witness.has_value());
  REQUIRE(!cert.diagnostics.empty());
  CHECK(cert.diagnostics[0].find("drops the attainable reach") !=
        std::string::npos);
}

TEST_CASE("check_existence: two sure routes admit a witness") {
  const Mdp mdp = golden::twopath();
  const ExistenceCertificate cert = check_existence(mdp);
  CHECK(cert.exists);
  CHECK(cert.infimum == doctest::Approx(1.5));
  CHECK(cert.x_initial == doctest::Approx(1.0));
  CHECK(cert.xbar_initial == doctest::Approx(1.0));
  REQUIRE(cert.witness.has_value());
  CHECK(cert.witness->choices() == std::vector<int>{1, 0, 0});
  CHECK(reach_prob(mdp, *cert.witness) == doctest::Approx(1.0));
  CHECK(evaluate_cost(mdp, *cert.witness) == doctest::Approx(1.5));
}

TEST_CASE("check_existence: costly loop flips the answer with the discount") {
  // At beta=0.5 looping forever costs 0.2 < 1, so the cost optimum still
  // avoids the target and no optimal policy exists. At beta=0.95 the paid
  // step is cheaper than looping and becomes a witness.
  const ExistenceCertificate low = check_existence(golden::fig1(0.1, 0.5));
  CHECK(!low.exists);
  CHECK(low.infimum == doctest::Approx(0.2));

  const ExistenceCertificate high = check_existence(golden::fig1(0.1, 0.95));
  CHECK(high.exists);
  CHECK(high.infimum == doctest::Approx(1.0));
  REQUIRE(high.witness.has_value());
  CHECK(evaluate_cost(golden::fig1(0.1, 0.95), *high.witness) ==
        doctest::Approx(1.0));
}

TEST_CASE("check_existence: witnesses verify externally on random instances") {
  std::mt19937_64 rng(405);
  golden::RandomMdpConfig cfg;
  int found = 0;
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    const Mdp mdp = golden::random_mdp(rng, cfg);
    const ExistenceCertificate cert = check_existence(mdp);
    CHECK(cert.xbar.size() == static_cast<std::size_t>(mdp.num_states()));
    CHECK(cert.xbar_initial <= cert.x_initial + 1e-9);
    if (!cert.exists) {
      CHECK(!cert.witness.has_value());
      continue;
    }
    ++found;
    REQUIRE(cert.witness.has_value());
    CHECK(cert.witness->is_deterministic());
    CHECK(std::abs(reach_prob(mdp, *cert.witness) - cert.x_initial) <= 1e-6);
    CHECK(std::abs(evaluate_cost(mdp, *cert.witness) - cert.infimum) <= 1e-6);
  }
  CHECK(found > 0);  // the suite must exercise the witness path
}
