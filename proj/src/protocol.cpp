#include "msqkd/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "msqkd/errors.hpp"

namespace msqkd {

namespace {

// p_a below this is treated as "no iteration is ever accepted".
constexpr double kAbortFloor = 1e-15;

bool in_unit_interval(double x) { return x >= -kSpectralTol && x <= 1.0 + kSpectralTol; }

}  // namespace

void ObservedStatistics::validate() const {
  double alpha_sum = 0.0, joint_sum = 0.0, pa = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      if (!in_unit_interval(alpha_sq[i][j]) || !in_unit_interval(F[i][j]) || !in_unit_interval(p_joint[i][j])) {
        throw std::invalid_argument("ObservedStatistics: entry outside [0,1]");
      }
      alpha_sum += alpha_sq[i][j];
      joint_sum += p_joint[i][j];
      pa += alpha_sq[i][j] * F[i][j];
    }
  }
  if (!in_unit_interval(p_w) || !in_unit_interval(p_a) || !in_unit_interval(Q)) {
    throw std::invalid_argument("ObservedStatistics: entry outside [0,1]");
  }
  if (std::abs(alpha_sum - 1.0) > kSpectralTol) throw std::invalid_argument("ObservedStatistics: alpha_sq does not sum to 1");
  if (std::abs(joint_sum - 1.0) > kSpectralTol) throw std::invalid_argument("ObservedStatistics: p_joint does not sum to 1");
  if (std::abs(pa - p_a) > kSpectralTol) throw std::invalid_argument("ObservedStatistics: p_a inconsistent with alpha_sq and F");
  if (std::abs(Q - alpha_sq[0][1] - alpha_sq[1][0]) > kSpectralTol) {
    throw std::invalid_argument("ObservedStatistics: Q inconsistent with alpha_sq");
  }
}

ProbabilityTable ObservedStatistics::joint_table() const {
  return ProbabilityTable{{{"00", p_joint[0][0]}, {"01", p_joint[0][1]}, {"10", p_joint[1][0]}, {"11", p_joint[1][1]}},
                          true};
}

ObservedStatistics derive_statistics(const PairGrid& alpha_sq, const PairGrid& F, double p_w) {
  ObservedStatistics s;
  s.alpha_sq = alpha_sq;
  s.F = F;
  s.p_w = p_w;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) s.p_a += alpha_sq[i][j] * F[i][j];
  }
  if (!(s.p_a > kAbortFloor)) throw AbortCondition("p_a = 0: no iteration can be accepted");
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) s.p_joint[i][j] = alpha_sq[i][j] * F[i][j] / s.p_a;
  }
  s.Q = alpha_sq[0][1] + alpha_sq[1][0];
  return s;
}

AttackOperator ProtocolSetup::effective_attack() const {
  return reverse ? absorb_channel(*reverse, attack) : attack;
}

DensityOperator ProtocolSetup::transit_state() const { return forward.apply(initial.density()); }

double minus_branch_weight(const Matrix& sigma, const Matrix& f_gram) { return (sigma * f_gram).trace().real(); }

ExactRun run_exact(const ProtocolSetup& setup) {
  const AttackOperator eff = setup.effective_attack();
  const BranchStatistics branch = branch_statistics(eff);
  const DensityOperator transit = setup.transit_state();

  PairGrid alpha_sq{}, F{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto k = static_cast<Eigen::Index>(pair_index(i, j));
      alpha_sq[i][j] = transit.matrix()(k, k).real();
      F[i][j] = branch.f(i, j);
    }
  }
  // Both reflect: the transit state reaches the server untouched.
  const Matrix gram = eff.f_gram();
  const double p_w = minus_branch_weight(transit.matrix(), gram);
  ObservedStatistics stats = derive_statistics(alpha_sq, F, p_w);

  // Orthonormal coordinates for span{f_ij}; F = Q R holds exactly.
  const auto n = static_cast<Eigen::Index>(eff.f(0, 0).size());
  Matrix fmat(n, 4);
  for (std::size_t k = 0; k < 4; ++k) fmat.col(static_cast<Eigen::Index>(k)) = eff.f_branches()[k].amplitudes();
  Eigen::HouseholderQR<Matrix> qr(fmat);
  Matrix basis = qr.householderQ() * Matrix::Identity(n, 4);
  const Matrix coords = basis.adjoint() * fmat;  // 4 x 4, column k = f_k

  constexpr Eigen::Index kMem = 4;
  const Dims dims{2, 2, static_cast<std::size_t>(kMem), 2};
  Matrix rho = Matrix::Zero(2 * 2 * kMem * 2, 2 * 2 * kMem * 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto k = static_cast<Eigen::Index>(pair_index(i, j));
      const Eigen::Index x = (i == j) ? 0 : 1;
      const double weight = alpha_sq[i][j] / stats.p_a;
      // |i,j>_AB (x) |f_ij>_C (x) |x>_X with the AB pair fixed: a contiguous
      // block of C (x) X indices.
      Vector mem_x = Vector::Zero(kMem * 2);
      for (Eigen::Index c = 0; c < kMem; ++c) mem_x(c * 2 + x) = coords(c, k);
      rho.block(k * kMem * 2, k * kMem * 2, kMem * 2, kMem * 2) = weight * mem_x * mem_x.adjoint();
    }
  }
  return ExactRun{stats, branch, DensityOperator(std::move(rho), dims), std::move(basis)};
}

ExactRun run_exact(const InitialState& init, const NoiseChannel& forward, const AttackOperator& attack,
                   const std::optional<NoiseChannel>& reverse) {
  return run_exact(ProtocolSetup{init, forward, attack, reverse});
}

}  // namespace msqkd
