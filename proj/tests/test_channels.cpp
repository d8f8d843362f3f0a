#include <doctest.h>

#include <random>

#include "msqkd/attacks.hpp"
#include "msqkd/channels.hpp"
#include "test_support.hpp"

using namespace msqkd;
using doctest::Approx;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix apply_kraus(const std::vector<Matrix>& ops, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) out += k * rho * k.adjoint();
  return out;
}

}  // namespace

TEST_SUITE("channels") {
  TEST_CASE("identity channel leaves states unchanged") {
    const auto rho = DensityOperator::pure(bell_state(2));
    CHECK(max_abs(NoiseChannel::identity().apply(rho).matrix() - rho.matrix()) == 0.0);
  }

  TEST_CASE("full depolarization of Phi+ gives I/4") {
    const auto out = NoiseChannel::depolarizing(1.0).apply(DensityOperator::pure(bell_state(0)));
    CHECK(max_abs(out.matrix() - Matrix::Identity(4, 4) / 4.0) < 1e-15);
  }

  TEST_CASE("depolarized Phi+ has the expected Bell weights") {
    const double p = 0.3;
    const auto out = NoiseChannel::depolarizing(p).apply(DensityOperator::pure(bell_state(0)));
    for (std::size_t k = 0; k < 4; ++k) {
      const Vector b = bell_state(k).amplitudes();
      const double w = (b.adjoint() * out.matrix() * b)(0, 0).real();
      CHECK(w == Approx(k == 0 ? 1.0 - 3.0 * p / 4.0 : p / 4.0).epsilon(1e-14));
    }
  }

  TEST_CASE("depolarizing parameter must lie in [0,1]") {
    CHECK_THROWS_AS(NoiseChannel::depolarizing(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(NoiseChannel::depolarizing(1.01), std::invalid_argument);
    CHECK_NOTHROW(NoiseChannel::depolarizing(0.0));
    CHECK_NOTHROW(NoiseChannel::depolarizing(1.0));
  }

  TEST_CASE("apply rejects a dimension mismatch") {
    CHECK_THROWS_AS(NoiseChannel::depolarizing(0.1).apply(DensityOperator::maximally_mixed({2})), std::invalid_argument);
  }

  TEST_CASE("Kraus constructor checks trace preservation") {
    CHECK_THROWS_AS(NoiseChannel::kraus({0.5 * Matrix::Identity(2, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(NoiseChannel::kraus({}), std::invalid_argument);
    CHECK_THROWS_AS(NoiseChannel::kraus({Matrix::Identity(2, 2), Matrix::Zero(3, 3)}), std::invalid_argument);
    const double g = 0.2;
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - g);
    k1 << 0.0, std::sqrt(g), 0.0, 0.0;
    const auto ch = NoiseChannel::kraus({k0, k1});
    const auto out = ch.apply(DensityOperator::diagonal(std::array<double, 2>{0.0, 1.0}, {2}));
    CHECK(out.matrix()(0, 0).real() == Approx(g));
  }

  TEST_CASE("Weyl operators are unitary and trace orthogonal") {
    const std::size_t d = 4;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        const Matrix w = weyl_operator(d, a, b);
        CHECK(max_abs(w * w.adjoint() - Matrix::Identity(4, 4)) < 1e-14);
        const double tr = std::abs(w.trace());
        CHECK(tr == Approx((a == 0 && b == 0) ? 4.0 : 0.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("property: Kraus form of a depolarizing channel matches the affine form") {
    std::mt19937_64 gen(77);
    for (double p : {0.0, 0.05, 0.3, 0.75, 1.0}) {
      const auto ch = NoiseChannel::depolarizing(p);
      const auto ops = ch.kraus_operators();
      CHECK(ops.size() == (p > 0.0 ? 16u : 1u));
      for (int trial = 0; trial < 20; ++trial) {
        const auto rho = testing::random_density({2, 2}, gen);
        CHECK(max_abs(apply_kraus(ops, rho.matrix()) - ch.apply(rho).matrix()) < 1e-13);
      }
    }
  }

  TEST_CASE("composition of depolarizing channels") {
    const auto c = compose(NoiseChannel::depolarizing(0.1), NoiseChannel::depolarizing(0.2));
    CHECK(c.kind() == NoiseChannel::Kind::depolarizing);
    CHECK(c.parameter() == Approx(1.0 - 0.9 * 0.8));
    CHECK(compose(NoiseChannel::identity(), NoiseChannel::depolarizing(0.3)).parameter() == Approx(0.3));
  }

  TEST_CASE("property: general composition agrees with sequential application") {
    std::mt19937_64 gen(3);
    const double g = 0.35;
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - g);
    k1 << 0.0, std::sqrt(g), 0.0, 0.0;
    const auto damp = NoiseChannel::kraus({k0, k1});
    const auto dep = NoiseChannel::depolarizing(0.4, 2);
    const auto c = compose(damp, dep);
    for (int trial = 0; trial < 50; ++trial) {
      const auto rho = testing::random_density({2}, gen);
      CHECK(max_abs(c.apply(rho).matrix() - dep.apply(damp.apply(rho)).matrix()) < 1e-13);
    }
  }

  TEST_CASE("property: channels preserve trace and positivity") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const auto rho = testing::random_density({2, 2}, gen);
      // The validating constructor inside apply rejects any loss of positivity.
      const auto out = NoiseChannel::depolarizing(u(gen)).apply(rho);
      CHECK(out.trace() == Approx(1.0).epsilon(1e-12));
    }
  }
}
