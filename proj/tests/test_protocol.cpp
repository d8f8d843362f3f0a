#include <doctest.h>

#include <random>

#include "msqkd/errors.hpp"
#include "msqkd/hermitian_eigen.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/oracle.hpp"
#include "msqkd/protocol.hpp"
#include "test_support.hpp"

using namespace msqkd;
using doctest::Approx;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ProtocolSetup semi_honest_setup(double p, double q) {
  return {InitialState::bell_phi_plus(), NoiseChannel::depolarizing(p), semi_honest_attack(),
          NoiseChannel::depolarizing(q)};
}

// The accepted-iteration state assembled directly from the raw branch vectors
// on A (x) B (x) (T_A T_B C) (x) X.
Matrix raw_accepted_state(const ExactRun& run, const AttackOperator& eff) {
  const auto n = eff.f(0, 0).amplitudes().size();
  const Eigen::Index dim = 4 * n * 2;
  Matrix rho = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Vector ab = StateVector::basis({2, 2}, pair_index(i, j)).amplitudes();
      const Vector x = StateVector::basis({2}, i == j ? 0 : 1).amplitudes();
      const Vector v = kron(kron(ab, eff.f(i, j).amplitudes()), x);
      rho += run.stats.alpha_sq[i][j] / run.stats.p_a * v * v.adjoint();
    }
  }
  return rho;
}

// rho_abcx with C mapped back through memory_basis.
Matrix lifted_state(const ExactRun& run) {
  const Matrix lift = kron(kron(Matrix::Identity(4, 4), run.memory_basis), Matrix::Identity(2, 2));
  return lift * run.rho_abcx.matrix() * lift.adjoint();
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("derive_statistics fills the derived quantities") {
    const PairGrid a{{{0.4, 0.1}, {0.1, 0.4}}};
    const PairGrid F{{{0.5, 0.2}, {0.2, 0.5}}};
    const auto s = derive_statistics(a, F, 0.05);
    CHECK(s.p_a == Approx(0.44));
    CHECK(s.Q == Approx(0.2));
    CHECK(s.p_joint[0][0] == Approx(0.2 / 0.44));
    CHECK(s.p_joint[0][1] == Approx(0.02 / 0.44));
    CHECK_NOTHROW(s.validate());
    const auto t = s.joint_table();
    CHECK(t.at("11") == Approx(0.2 / 0.44));
  }

  TEST_CASE("derive_statistics aborts when nothing is accepted") {
    const PairGrid a{{{0.5, 0.0}, {0.0, 0.5}}};
    const PairGrid zero{};
    CHECK_THROWS_AS(derive_statistics(a, zero, 0.0), AbortCondition);
  }

  TEST_CASE("validate detects inconsistent statistics") {
    auto s = derive_statistics({{{0.5, 0.0}, {0.0, 0.5}}}, {{{0.5, 0.0}, {0.0, 0.5}}}, 0.0);
    auto bad = s;
    bad.p_a = 0.7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.Q = 0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.F[0][0] = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("noiseless honest protocol") {
    const auto run = run_exact(semi_honest_setup(0.0, 0.0));
    const auto& s = run.stats;
    CHECK(s.Q == 0.0);
    CHECK(s.p_w == Approx(0.0).epsilon(1e-15));
    CHECK(s.p_a == Approx(0.5));
    CHECK(s.p_joint[0][0] == Approx(0.5));
    CHECK(s.p_joint[1][1] == Approx(0.5));
    CHECK(s.p_joint[0][1] == 0.0);
    CHECK(run.branch.h0_norm < 1e-15);
  }

  TEST_CASE("run_exact matches the semi-honest closed forms entrywise") {
    for (double p : {0.0, 0.05, 0.1, 0.2, 0.3}) {
      for (double q : {0.0, 0.05, 0.1, 0.2, 0.3}) {
        const auto run = run_exact(semi_honest_setup(p, q));
        const auto closed = scenario_semi_honest(p, q);
        CAPTURE(p);
        CAPTURE(q);
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(run.stats.alpha_sq[i][j] - closed.stats.alpha_sq[i][j]) <= 1e-10);
            CHECK(std::abs(run.stats.F[i][j] - closed.stats.F[i][j]) <= 1e-10);
            CHECK(std::abs(run.stats.p_joint[i][j] - closed.stats.p_joint[i][j]) <= 1e-10);
          }
        }
        CHECK(std::abs(run.stats.p_w - closed.stats.p_w) <= 1e-10);
        CHECK(std::abs(run.stats.p_a - closed.stats.p_a) <= 1e-10);
        CHECK(std::abs(run.branch.h0_norm - closed.eta) <= 1e-10);
      }
    }
  }

  TEST_CASE("memory-basis state lifts back to the raw-vector state") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const ProtocolSetup setup{InitialState::random(seed + 1000), NoiseChannel::depolarizing(0.01 * (seed % 7)),
                                random_attack(1 + seed % 2, seed), std::nullopt};
      const auto run = run_exact(setup);
      CHECK(max_abs(run.memory_basis.adjoint() * run.memory_basis - Matrix::Identity(4, 4)) < 1e-12);
      CHECK(max_abs(lifted_state(run) - raw_accepted_state(run, setup.effective_attack())) < 1e-12);
    }
  }

  TEST_CASE("memory-basis state lifts back with an absorbed reverse channel") {
    const ProtocolSetup setup{InitialState::random(5), NoiseChannel::identity(), random_attack(1, 9),
                              NoiseChannel::depolarizing(0.15)};
    const auto run = run_exact(setup);
    CHECK(setup.effective_attack().ancilla_dim() == 16);
    CHECK(max_abs(lifted_state(run) - raw_accepted_state(run, setup.effective_attack())) < 1e-12);
  }

  TEST_CASE("property: p_a and p_w agree with direct branch norms") {
    std::mt19937_64 gen(4);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const ProtocolSetup setup{InitialState::random(seed), NoiseChannel::depolarizing(0.1), random_attack(2, seed),
                                std::nullopt};
      const auto run = run_exact(setup);
      CHECK_NOTHROW(run.stats.validate());
      // Both reflect: apply the attack to the transit state and weigh the -1 branch.
      const Matrix sigma = setup.transit_state().matrix();
      double direct = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t l = 0; l < 4; ++l) {
          direct += (sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                     setup.attack.f_branches()[l].inner(setup.attack.f_branches()[k]))
                        .real();
        }
      }
      CHECK(run.stats.p_w == Approx(direct).epsilon(1e-12));
      CHECK(run.rho_abcx.trace() == Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("property: closed-form lambda matches the Jacobi spectrum of sigma_C on 1000 instances") {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const ProtocolSetup setup{InitialState::random(seed * 7 + 3), NoiseChannel::depolarizing(0.02 * (seed % 6)),
                                random_attack(1 + seed % 2, seed), std::nullopt};
      const auto run = run_exact(setup);
      const auto sigma_c = conditional_server_state(run, 0);
      REQUIRE(sigma_c.has_value());
      const auto ev = eigenvalues_hermitian(*sigma_c);
      const auto& s = run.stats;
      const auto [lp, lm] =
          lambda_plus_minus(s.alpha_sq[0][0], s.alpha_sq[1][1], s.F[0][0], s.F[1][1], std::norm(run.branch.overlap00_11));
      worst = std::max({worst, std::abs(lp - ev[0]), std::abs(lm - ev[1])});
      CHECK(numerical_rank(*sigma_c) <= 2);
    }
    CHECK(worst <= 1e-10);
  }
}
