#pragma once

// Server-side behaviour: the two-qubit state it distributes and the unitary it
// applies to the returning transit qubits. The unitary is stored through its
// action on computational inputs,
//
//   |i,j> (x) |0>_C (x) |0>_cl  ->  |+1> (x) |e_ij>  +  |-1> (x) |f_ij>,
//
// with e_ij, f_ij in T_A (x) T_B (x) C (dims {2, 2, d_C}).

#include <array>
#include <cstdint>
#include <optional>

#include "msqkd/channels.hpp"
#include "msqkd/linalg.hpp"

namespace msqkd {

/// Flat index 2i + j of the computational pair |i,j>.
constexpr std::size_t pair_index(std::size_t i, std::size_t j) { return 2 * i + j; }

/// Bell states in the order Phi+, Phi-, Psi+, Psi-.
StateVector bell_state(std::size_t k);

struct InitialState {
  std::array<cplx, 4> alpha;  // indexed by pair_index

  /// Throws std::invalid_argument unless sum |alpha|^2 = 1 within kStructTol.
  explicit InitialState(const std::array<cplx, 4>& amplitudes);

  static InitialState bell_phi_plus();
  /// Real non-negative amplitudes sqrt(p_ij).
  static InitialState from_probabilities(const std::array<double, 4>& p);
  /// Uniformly random pure state, deterministic in the seed.
  static InitialState random(std::uint64_t seed);

  StateVector state() const;
  DensityOperator density() const;
};

class AttackOperator {
 public:
  /// Checks that every branch vector has dims {2, 2, ancilla_dim}. Unitarity
  /// is not enforced here; see validate_unitarity.
  AttackOperator(std::size_t ancilla_dim, std::array<StateVector, 4> e, std::array<StateVector, 4> f);

  std::size_t ancilla_dim() const { return d_c_; }
  const StateVector& e(std::size_t i, std::size_t j) const { return e_[pair_index(i, j)]; }
  const StateVector& f(std::size_t i, std::size_t j) const { return f_[pair_index(i, j)]; }
  const std::array<StateVector, 4>& e_branches() const { return e_; }
  const std::array<StateVector, 4>& f_branches() const { return f_; }

  /// gram(k, l) = <f_k|f_l> over pair indices.
  Matrix f_gram() const;
  Matrix e_gram() const;

 private:
  std::size_t d_c_;
  std::array<StateVector, 4> e_;
  std::array<StateVector, 4> f_;
};

/// Images of the Bell inputs: U|phi_k> = |+1, g_k> + |-1, h_k>.
struct BellBranches {
  std::array<StateVector, 4> g;
  std::array<StateVector, 4> h;
};

BellBranches bell_branches(const AttackOperator& u);

/// Honest Bell measurement with the outcome k written to an orthonormal
/// pointer |k>_C (d_C = 4); message -1 exactly on Phi-.
AttackOperator semi_honest_attack();

/// Four columns of a Haar-random unitary on C^{8 d_C}, obtained by QR of a
/// complex Gaussian matrix with the phase of R's diagonal removed. Throws
/// std::invalid_argument for d_C = 0.
AttackOperator random_attack(std::size_t ancilla_dim, std::uint64_t seed);

/// Effective attack for "channel on the transit pair, then u". The channel is
/// dilated with its Kraus operators and the environment index is appended to
/// the ancilla, so the result has d_C = u.ancilla_dim() * (number of Kraus ops).
AttackOperator absorb_channel(const NoiseChannel& pre, const AttackOperator& u);

struct UnitarityReport {
  double max_deviation = 0.0;  // over the 16 constraints <e_a|e_b> + <f_a|f_b> = delta_ab
  bool pass = false;           // max_deviation <= kSpectralTol
};

UnitarityReport validate_unitarity(const AttackOperator& u);

struct BranchStatistics {
  std::array<double, 4> F{};  // <f_ij|f_ij>, indexed by pair_index
  cplx overlap00_11{};        // <f_00|f_11>
  double h0_norm = 0.0;       // <h_0|h_0>

  double f(std::size_t i, std::size_t j) const { return F[pair_index(i, j)]; }
};

/// When `pre_reverse` is given, the statistics are those of
/// absorb_channel(*pre_reverse, u).
BranchStatistics branch_statistics(const AttackOperator& u, const std::optional<NoiseChannel>& pre_reverse = std::nullopt);

}  // namespace msqkd
