#include "msqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "msqkd/entropy.hpp"
#include "msqkd/errors.hpp"

namespace msqkd {

namespace {

constexpr double kAbortFloor = 1e-15;

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

}  // namespace

OverlapBound overlap_lower_bound(double eta, double F00, double F11, bool exact_equality) {
  require_unit(eta, "eta");
  require_unit(F00, "F00");
  require_unit(F11, "F11");
  const double gap = 0.5 * F00 + 0.5 * F11 - eta;
  OverlapBound out;
  if (exact_equality || gap >= 0.0) {
    out.value = gap * gap;
  } else {
    out.used_fallback = true;
  }
  out.value = std::min(out.value, F00 * F11);
  return out;
}

std::pair<double, double> lambda_plus_minus(double alpha00_sq, double alpha11_sq, double F00, double F11,
                                            double overlap_sq) {
  const double denom = alpha00_sq * F00 + alpha11_sq * F11;
  if (!(denom > kAbortFloor)) throw AbortCondition("p_C = 0: every accepted raw-key bit is wrong");
  const double q0 = 1.0 / denom;
  const double delta = alpha00_sq * F00 - alpha11_sq * F11;
  const double radical = std::sqrt(std::max(0.0, delta * delta + 4.0 * alpha00_sq * alpha11_sq * overlap_sq));
  const double lp = std::min(1.0, 0.5 + 0.5 * q0 * radical);
  return {lp, 1.0 - lp};
}

KeyRateReport key_rate_bound(const KeyRateInputs& inputs, const BoundOptions& options) {
  require_unit(inputs.eta, "eta");
  const auto& s = inputs.stats;
  const auto& a = s.alpha_sq;
  const auto& F = s.F;

  KeyRateReport r;
  r.Q = s.Q;
  r.p_a = a[0][0] * F[0][0] + a[0][1] * F[0][1] + a[1][0] * F[1][0] + a[1][1] * F[1][1];
  if (!(r.p_a > kAbortFloor)) throw AbortCondition("p_a = 0: no iteration can be accepted");
  const double correct = a[0][0] * F[0][0] + a[1][1] * F[1][1];
  const double wrong = a[0][1] * F[0][1] + a[1][0] * F[1][0];
  r.p_C = correct / r.p_a;
  r.p_W = wrong / r.p_a;
  if (!(correct > kAbortFloor)) throw AbortCondition("p_C = 0: every accepted raw-key bit is wrong");

  r.Delta = a[0][0] * F[0][0] - a[1][1] * F[1][1];
  r.q0 = 1.0 / correct;
  const OverlapBound overlap = overlap_lower_bound(inputs.eta, F[0][0], F[1][1], inputs.exact_equality);
  r.F_lower = overlap.value;
  r.used_fallback = overlap.used_fallback;
  r.lambda_tilde = lambda_plus_minus(a[0][0], a[1][1], F[0][0], F[1][1], r.F_lower).first * options.lambda_scale;

  const double p_b0 = s.p_joint[0][0] + s.p_joint[1][0];
  r.term_hp0 = binary_entropy(std::clamp(p_b0, 0.0, 1.0));
  r.term_HpCpW = r.p_W > 0.0 ? binary_entropy(std::clamp(r.p_C, 0.0, 1.0)) : 0.0;
  r.term_pW = r.p_W;
  r.term_pChlam = r.p_C * binary_entropy(std::clamp(r.lambda_tilde, 0.0, 1.0));
  r.rate = r.term_hp0 - r.term_HpCpW - r.term_pW - r.term_pChlam;

  // S(ACX) is the entropy of {|a_ij|^2 F_ij / p_a}; H(A,B) uses the reported
  // raw-key distribution. The two coincide for consistent statistics.
  std::vector<double> acx, joint;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      acx.push_back(std::clamp(a[i][j] * F[i][j] / r.p_a, 0.0, 1.0));
      joint.push_back(std::clamp(s.p_joint[i][j], 0.0, 1.0));
    }
  }
  r.rate_long_form = shannon_entropy(acx) - r.term_HpCpW - r.term_pW - r.term_pChlam - shannon_entropy(joint) + r.term_hp0;
  if (std::abs(r.rate_long_form - r.rate) > kSpectralTol) {
    throw std::logic_error("key_rate_bound: simplified and long-form rates disagree; statistics are inconsistent");
  }
  r.rate_per_qubit = r.rate * r.p_a;
  return r;
}

KeyRateInputs scenario_semi_honest(double p, double q) {
  require_unit(p, "p");
  require_unit(q, "q");
  const double diag_a = (2.0 - p) / 4.0, off_a = p / 4.0;
  const double diag_f = (2.0 - q) / 4.0, off_f = q / 4.0;
  // A reflected Phi+ passes both channels; the server answers -1 on Phi-.
  const double p_w = (1.0 - (1.0 - p) * (1.0 - q)) / 4.0;
  KeyRateInputs in;
  in.stats = derive_statistics({{{diag_a, off_a}, {off_a, diag_a}}}, {{{diag_f, off_f}, {off_f, diag_f}}}, p_w);
  in.eta = q / 4.0;
  in.source = EtaSource::scenario_derived;
  in.exact_equality = true;
  return in;
}

double symmetric_eta(double Q, double p_w, double F_neq) {
  if (!(Q >= 0.0 && Q < 1.0)) throw std::invalid_argument("symmetric_eta: Q must lie in [0, 1)");
  require_unit(p_w, "p_w");
  require_unit(F_neq, "F_neq");
  const double root = std::sqrt(1.0 - Q) * (std::sqrt(Q * F_neq) + std::sqrt(p_w)) / (1.0 - Q);
  return root * root;
}

double semi_honest_eta_estimate(const ObservedStatistics& s) {
  const double q_hat = (s.F[0][1] + s.F[1][0]) + 1.0 - (s.F[0][0] + s.F[1][1]);
  return std::clamp(q_hat / 4.0, 0.0, 1.0);
}

KeyRateInputs scenario_symmetric_adversarial(double Q, double p_w, double F_eq, double F_neq) {
  if (!(Q >= 0.0 && Q < 1.0)) throw std::invalid_argument("scenario_symmetric_adversarial: Q must lie in [0, 1)");
  require_unit(p_w, "p_w");
  require_unit(F_eq, "F_eq");
  require_unit(F_neq, "F_neq");
  const double diag_a = (1.0 - Q) / 2.0, off_a = Q / 2.0;
  KeyRateInputs in;
  in.stats = derive_statistics({{{diag_a, off_a}, {off_a, diag_a}}}, {{{F_eq, F_neq}, {F_neq, F_eq}}}, p_w);
  // The symmetric-attack bound may exceed 1 for large Q; <h0|h0> <= 1 anyway.
  in.eta = std::min(1.0, symmetric_eta(Q, p_w, F_neq));
  in.source = EtaSource::scenario_derived;
  in.exact_equality = false;
  return in;
}

ScenarioFamily semi_honest_family() {
  return [](double Q) { return scenario_semi_honest(2.0 * Q, 2.0 * Q); };
}

ScenarioFamily adversarial_acceptance_family(double target_p_a) {
  return [target_p_a](double Q) {
    return scenario_symmetric_adversarial(Q, Q, (target_p_a - Q * Q) / (1.0 - Q), Q);
  };
}

ScenarioFamily adversarial_depolarization_family() {
  return [](double Q) { return scenario_symmetric_adversarial(Q, Q, (1.0 - Q) / 2.0, Q / 2.0); };
}

double family_rate(const ScenarioFamily& family, double Q, const BoundOptions& options) {
  try {
    return key_rate_bound(family(Q), options).rate;
  } catch (const AbortCondition&) {
    return -std::numeric_limits<double>::infinity();
  }
}

double noise_threshold(const ScenarioFamily& family, double lo, double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("noise_threshold: need lo < hi and tol > 0");
  if (!(family_rate(family, lo) > 0.0) || !(family_rate(family, hi) <= 0.0)) {
    throw std::invalid_argument("noise_threshold: no sign change of the rate in [lo, hi]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (family_rate(family, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SweepPoint> sweep(const ScenarioFamily& family, std::span<const double> grid, const BoundOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double Q : grid) {
    SweepPoint pt;
    pt.Q = Q;
    try {
      pt.report = key_rate_bound(family(Q), options);
    } catch (const AbortCondition& e) {
      pt.abort_reason = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace msqkd
