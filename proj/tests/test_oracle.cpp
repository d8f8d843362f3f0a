#include <doctest.h>

#include "msqkd/entropy.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/oracle.hpp"

using namespace msqkd;
using doctest::Approx;

namespace {

ProtocolSetup semi_honest_setup(double p, double q) {
  return {InitialState::bell_phi_plus(), NoiseChannel::depolarizing(p), semi_honest_attack(),
          NoiseChannel::depolarizing(q)};
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("noiseless honest run has one bit of exact key") {
    const auto run = run_exact(semi_honest_setup(0.0, 0.0));
    const auto ex = exact_key_rate(run.rho_abcx, run.stats.joint_table());
    CHECK(ex.S_A_C == Approx(1.0));
    CHECK(std::abs(ex.H_A_B) < 1e-12);
    CHECK(ex.rate_exact == Approx(1.0));
  }

  TEST_CASE("semi-honest exact rate equals the closed-form bound") {
    for (double q : {0.05, 0.1, 0.2}) {
      const auto run = run_exact(semi_honest_setup(q, q));
      const double exact = exact_key_rate(run.rho_abcx, run.stats.joint_table()).rate_exact;
      const double bound = key_rate_bound(scenario_semi_honest(q, q)).rate;
      CAPTURE(q);
      CHECK(exact >= bound - kDominanceTol);
      CHECK(exact == Approx(bound).epsilon(1e-9));
    }
  }

  TEST_CASE("exact_key_rate rejects a wrong layout") {
    const auto rho = DensityOperator::maximally_mixed({2, 2, 4});
    const ProbabilityTable t{{{"00", 0.25}, {"01", 0.25}, {"10", 0.25}, {"11", 0.25}}, true};
    CHECK_THROWS_AS(exact_key_rate(rho, t), std::invalid_argument);
  }

  TEST_CASE("conditional server states") {
    const auto run = run_exact(semi_honest_setup(0.0, 0.0));
    const auto c = conditional_server_state(run, 0);
    REQUIRE(c.has_value());
    CHECK(c->trace() == Approx(1.0));
    // No mismatching bits without noise.
    CHECK_FALSE(conditional_server_state(run, 1).has_value());
  }

  TEST_CASE("entropy decompositions hold on semi-honest and random runs") {
    for (double q : {0.0, 0.1, 0.3}) {
      const auto rep = verify_entropy_decompositions(run_exact(semi_honest_setup(q, q)));
      CAPTURE(q);
      CHECK(rep.acx_ok());
      CHECK(rep.cx_ok());
      CHECK(rep.rank_ok());
      CHECK(rep.lambda_ok());
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const ProtocolSetup setup{InitialState::random(seed), NoiseChannel::depolarizing(0.05), random_attack(1 + seed % 2, seed),
                                seed % 3 == 0 ? std::optional(NoiseChannel::depolarizing(0.1)) : std::nullopt};
      const auto rep = verify_entropy_decompositions(run_exact(setup));
      CAPTURE(seed);
      CHECK(rep.pass());
      CHECK(rep.rank_sigma_C <= 2);
      CHECK(rep.rank_sigma_W <= 2);
    }
  }

  TEST_CASE("p_W decomposition weights match the raw-key distribution") {
    const auto run = run_exact(semi_honest_setup(0.2, 0.2));
    const auto rep = verify_entropy_decompositions(run);
    const auto bound = key_rate_bound(scenario_semi_honest(0.2, 0.2));
    CHECK(rep.p_C == Approx(bound.p_C));
    CHECK(rep.p_W == Approx(bound.p_W));
  }

  TEST_CASE("dominance holds on a small mixed batch") {
    const auto batch = default_certification_batch(60, 77);
    CHECK(batch.size() == 60 + 4 + 4);
    const auto rep = certify_dominance(batch);
    CHECK(rep.pass());
    CHECK(rep.violations == 0);
    CHECK(rep.worst_slack >= -kDominanceTol);
    for (const auto& r : rep.records) {
      CAPTURE(r.id);
      CHECK_FALSE(r.skipped);
      CHECK(r.checks_passed);
      if (r.rate_bound_symmetric) CHECK(*r.rate_bound_symmetric <= r.rate_exact + kDominanceTol);
    }
  }

  TEST_CASE("halving lambda~ breaks dominance") {
    // Halving only raises the bound where lambda~ < 2/3, so a full-size batch is
    // needed to contain such instances.
    const auto batch = default_certification_batch(500, 77);
    const auto rep = certify_dominance(batch, BoundOptions{0.5});
    CHECK_FALSE(rep.pass());
    CHECK(rep.worst_slack < -kDominanceTol);
  }

  TEST_CASE("certification batch is deterministic in the seed") {
    const auto a = certify_dominance(default_certification_batch(10, 5));
    const auto b = certify_dominance(default_certification_batch(10, 5));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].id == b.records[k].id);
      CHECK(a.records[k].rate_exact == b.records[k].rate_exact);
    }
  }

  TEST_CASE("symmetric case construction") {
    CHECK_THROWS_AS(symmetric_adversarial_case(0.1, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(symmetric_adversarial_case(1.0, 0.1), std::invalid_argument);
    const auto c = symmetric_adversarial_case(0.1, 0.05);
    const auto run = run_exact(c.setup);
    CHECK(run.stats.Q == Approx(0.1));
    CHECK(run.stats.p_w == Approx(0.05));
  }

  TEST_CASE("random attack cases need ancilla dimensions") {
    CHECK_THROWS_AS(random_attack_cases(3, std::span<const std::size_t>{}, 1), std::invalid_argument);
  }
}
