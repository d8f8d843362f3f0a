#pragma once

// Asymptotic key-rate lower bound from observable statistics.
//
// With p_C, p_W the matching / mismatching split of accepted raw-key bits,
//
//   r >= h(p_B(0)) - H(p_C, p_W) - p_W - p_C h(lambda~),
//   lambda~ = 1/2 + (q0 / 2) sqrt(Delta^2 + 4 |a00|^2 |a11|^2 F_lower),
//
// where Delta = |a00|^2 F00 - |a11|^2 F11, q0 = 1 / (|a00|^2 F00 + |a11|^2 F11)
// and F_lower is a lower bound on |<f00|f11>|^2 obtained from an upper bound
// eta on <h0|h0>.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msqkd/protocol.hpp"

namespace msqkd {

enum class EtaSource { measured_exact, scenario_derived };

struct KeyRateInputs {
  ObservedStatistics stats;
  double eta = 0.0;  // upper bound on <h0|h0>, in [0,1]
  EtaSource source = EtaSource::scenario_derived;
  /// <h0|h0> = eta holds with equality, so Re<f00|f11> is pinned exactly.
  bool exact_equality = false;
};

struct KeyRateReport {
  double Q = 0.0;
  double p_a = 0.0;
  double p_C = 0.0;
  double p_W = 0.0;
  double Delta = 0.0;
  double q0 = 0.0;
  double F_lower = 0.0;
  double lambda_tilde = 0.5;
  // Additive terms: rate = term_hp0 - term_HpCpW - term_pW - term_pChlam.
  double term_hp0 = 0.0;
  double term_HpCpW = 0.0;
  double term_pW = 0.0;
  double term_pChlam = 0.0;
  double rate = 0.0;
  bool used_fallback = false;
  /// Unsimplified form H({p(a,b)}) - H(p_C,p_W) - p_W - p_C h(lambda~) - H({p(a,b)}) + h(p_B(0)).
  double rate_long_form = 0.0;
  /// rate * p_a, per transmitted qubit in the p_M -> 1 limit.
  double rate_per_qubit = 0.0;
};

struct OverlapBound {
  double value = 0.0;
  bool used_fallback = false;
};

/// Lower bound on |<f00|f11>|^2 from eta >= <h0|h0>. With exact equality, or
/// when eta <= (F00 + F11) / 2, the bound is ((F00 + F11) / 2 - eta)^2;
/// otherwise 0 with used_fallback. Clamped to at most F00 * F11.
OverlapBound overlap_lower_bound(double eta, double F00, double F11, bool exact_equality);

/// Eigenvalues (lambda+, lambda-) of the normalized matching-bit server state.
/// Throws AbortCondition when |a00|^2 F00 + |a11|^2 F11 = 0 (p_C = 0).
std::pair<double, double> lambda_plus_minus(double alpha00_sq, double alpha11_sq, double F00, double F11,
                                            double overlap_sq);

struct BoundOptions {
  /// Negative control only: multiplies lambda~ by this factor.
  double lambda_scale = 1.0;
};

/// Throws AbortCondition when p_a = 0 or p_C = 0, std::invalid_argument for
/// eta outside [0,1], std::logic_error if the simplified and long forms
/// disagree by more than kSpectralTol.
KeyRateReport key_rate_bound(const KeyRateInputs& inputs, const BoundOptions& options = {});

/// Depolarizing forward (p) and reverse (q) channels with an honest server.
KeyRateInputs scenario_semi_honest(double p, double q);

/// Symmetric adversarial parameterization; eta follows the symmetric-attack
/// bound ( sqrt(1-Q) (sqrt(Q F_neq) + sqrt(p_w)) / (1-Q) )^2. Throws
/// std::invalid_argument for Q = 1 or out-of-range inputs.
KeyRateInputs scenario_symmetric_adversarial(double Q, double p_w, double F_eq, double F_neq);
double symmetric_eta(double Q, double p_w, double F_neq);
/// eta for an honest server behind a depolarizing reverse channel, read off
/// observed statistics: q^ / 4 with q^ = (F01 + F10) + 1 - (F00 + F11),
/// clamped to [0, 1]. Matches eta = q / 4 on exact semi-honest statistics.
double semi_honest_eta_estimate(const ObservedStatistics& s);

/// A one-parameter family of inputs indexed by the mismatch rate Q.
using ScenarioFamily = std::function<KeyRateInputs(double Q)>;

/// p = q = 2Q.
ScenarioFamily semi_honest_family();
/// F_neq = Q, F_eq = (p~_a - Q^2) / (1 - Q), p_w = Q; then p_a = p~_a.
ScenarioFamily adversarial_acceptance_family(double target_p_a);
/// F_neq = Q / 2, F_eq = (1 - Q) / 2, p_w = Q.
ScenarioFamily adversarial_depolarization_family();

/// Rate of a family member; aborts count as -infinity (no key).
double family_rate(const ScenarioFamily& family, double Q, const BoundOptions& options = {});

/// Bisection on the sign change of the rate in [lo, hi] down to |hi - lo| <=
/// tol; returns the bracket midpoint. Throws std::invalid_argument unless
/// rate(lo) > 0 >= rate(hi).
double noise_threshold(const ScenarioFamily& family, double lo, double hi, double tol = 1e-6);

struct SweepPoint {
  double Q = 0.0;
  std::optional<KeyRateReport> report;  // empty on abort
  std::string abort_reason;
};

std::vector<SweepPoint> sweep(const ScenarioFamily& family, std::span<const double> grid,
                              const BoundOptions& options = {});

}  // namespace msqkd
