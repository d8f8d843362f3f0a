#pragma once

// Exact conditional entropies of the accepted-iteration state, used to check
// that the observable key-rate bound never exceeds the true rate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msqkd/keyrate.hpp"
#include "msqkd/protocol.hpp"

namespace msqkd {

struct ExactKeyRate {
  double S_A_C = 0.0;
  double S_A_CX = 0.0;
  double H_A_B = 0.0;
  double rate_exact = 0.0;  // S(A|C) - H(A|B)
};

/// `rho_abcx` must have factors (A, B, C, X) with A, B, X qubits; throws
/// std::invalid_argument otherwise, std::logic_error if S(A|C) < S(A|CX) -
/// kSpectralTol.
ExactKeyRate exact_key_rate(const DensityOperator& rho_abcx, const ProbabilityTable& p_joint);

struct DecompositionReport {
  double acx_error = 0.0;  // |S(ACX) - H({p(a,b)})|
  double cx_error = 0.0;   // |S(CX) - H(p_C,p_W) - p_C S(sigma_C) - p_W S(sigma_W)|
  std::size_t rank_sigma_C = 0;
  std::size_t rank_sigma_W = 0;  // 0 when p_W = 0 (block absent)
  double lambda_error = 0.0;     // closed-form lambda+- vs spectrum of sigma_C
  double p_C = 0.0;
  double p_W = 0.0;
  double S_sigma_C = 0.0;
  double S_sigma_W = 0.0;

  bool acx_ok() const { return acx_error <= kSpectralTol; }
  bool cx_ok() const { return cx_error <= kSpectralTol; }
  bool rank_ok() const { return rank_sigma_C <= 2 && rank_sigma_W <= 2; }
  bool lambda_ok() const { return lambda_error <= kSpectralTol; }
  bool pass() const { return acx_ok() && cx_ok() && rank_ok() && lambda_ok(); }
};

/// Checks the entropy identities that the bound is built from on a state
/// produced by run_exact. Rank cutoff: 1e-8 relative to trace.
DecompositionReport verify_entropy_decompositions(const ExactRun& run);

/// sigma_x = <x|_X rho_CX |x>_X / p_x, or nullopt when p_x = 0.
std::optional<DensityOperator> conditional_server_state(const ExactRun& run, std::size_t x);

struct CertificationCase {
  std::string id;
  ProtocolSetup setup;
  /// Also evaluate the bound with the symmetric-attack eta formula.
  bool symmetric_second_pass = false;
};

struct CertificationRecord {
  std::string id;
  bool skipped = false;
  std::string reason;
  double rate_exact = 0.0;
  double rate_bound = 0.0;  // eta = exact <h0|h0>
  std::optional<double> rate_bound_symmetric;
  double slack = 0.0;  // rate_exact - max(bound rates)
  bool checks_passed = false;
};

struct CertificationReport {
  std::vector<CertificationRecord> records;
  std::size_t violations = 0;  // slack < -1e-9 or failed decomposition checks
  std::size_t skipped = 0;
  double worst_slack = 0.0;
  bool pass() const { return violations == 0; }
};

inline constexpr double kDominanceTol = 1e-9;

CertificationRecord certify_instance(const CertificationCase& c, const BoundOptions& options = {});
CertificationReport certify_dominance(std::span<const CertificationCase> cases, const BoundOptions& options = {});

/// Random attacks and random initial states; ancilla dimensions cycle through
/// `ancilla_dims`. Instance k uses seed base_seed + k.
std::vector<CertificationCase> random_attack_cases(std::size_t count, std::span<const std::size_t> ancilla_dims,
                                                   std::uint64_t base_seed);
/// Phi+ source and honest server with depolarizing noise p = q on both legs.
std::vector<CertificationCase> semi_honest_cases(std::span<const double> noise);
/// A physical realization of the symmetric statistics: source with
/// |alpha_ii|^2 = (1 - Q)/2, |alpha_ij|^2 = Q/2 and an honest server behind a
/// reverse depolarizing channel q = 4 p_w (needs p_w <= 1/4).
CertificationCase symmetric_adversarial_case(double Q, double p_w);

/// The default batch: `random_count` random attacks over d_C in {1, 2},
/// followed by the fixed scenario grids (semi-honest noise {0, 0.1, 0.2, 0.3}
/// plus symmetric instances).
std::vector<CertificationCase> default_certification_batch(std::size_t random_count, std::uint64_t base_seed);

}  // namespace msqkd
