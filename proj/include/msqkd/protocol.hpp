#pragma once

#include <array>
#include <optional>

#include "msqkd/attacks.hpp"
#include "msqkd/channels.hpp"
#include "msqkd/entropy.hpp"
#include "msqkd/linalg.hpp"

namespace msqkd {

using PairGrid = std::array<std::array<double, 2>, 2>;

/// Everything the two users can estimate about one protocol iteration.
struct ObservedStatistics {
  PairGrid alpha_sq{};  // P(users measure |i,j>)
  PairGrid F{};         // P(message -1 | both measure-and-resend |i,j>)
  double p_w = 0.0;     // P(message -1 | both reflect)
  double p_a = 0.0;     // sum alpha_sq * F
  PairGrid p_joint{};   // raw-key distribution p(a, b) of accepted iterations
  double Q = 0.0;       // alpha_sq[0][1] + alpha_sq[1][0]

  /// Checks ranges and the p_a / p_joint / Q consistency relations at
  /// kSpectralTol; throws std::invalid_argument on violation.
  void validate() const;
  ProbabilityTable joint_table() const;
};

/// Completes the statistics from the primary observables. Throws
/// AbortCondition when p_a = 0.
ObservedStatistics derive_statistics(const PairGrid& alpha_sq, const PairGrid& F, double p_w);

/// The physical pipeline of one round, from state preparation through the
/// server unitary.
struct ProtocolSetup {
  InitialState initial;
  NoiseChannel forward;
  AttackOperator attack;
  std::optional<NoiseChannel> reverse;

  /// The attack with the reverse channel absorbed (or the attack itself).
  AttackOperator effective_attack() const;
  /// Forward-channel output on the transit pair (4x4).
  DensityOperator transit_state() const;
};

struct ExactRun {
  ObservedStatistics stats;
  BranchStatistics branch;  // of the effective attack
  /// Accepted-iteration state with factors (A, B, C, X). C is the server
  /// memory (transit qubits absorbed) written in the orthonormal basis
  /// `memory_basis`; X = 0 marks matching raw-key bits, X = 1 mismatches.
  DensityOperator rho_abcx;
  /// Columns span {f_ij} inside T_A (x) T_B (x) C of the effective attack.
  Matrix memory_basis;
};

/// Throws AbortCondition when p_a = 0.
ExactRun run_exact(const ProtocolSetup& setup);
ExactRun run_exact(const InitialState& init, const NoiseChannel& forward, const AttackOperator& attack,
                   const std::optional<NoiseChannel>& reverse);

/// P(message -1) when the transit pair `sigma` (possibly sub-normalized)
/// reaches a server whose -1 branches have Gram matrix `f_gram`.
double minus_branch_weight(const Matrix& sigma, const Matrix& f_gram);

}  // namespace msqkd
