#include "msqkd/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "msqkd/entropy.hpp"
#include "msqkd/errors.hpp"
#include "msqkd/hermitian_eigen.hpp"

namespace msqkd {

namespace {

constexpr std::size_t kA = 0, kB = 1, kC = 2, kX = 3;
constexpr double kEmptyBlock = 1e-15;
constexpr double kRankCutoff = 1e-8;

void check_layout(const DensityOperator& rho) {
  const auto& d = rho.dims();
  if (d.size() != 4 || d[kA] != 2 || d[kB] != 2 || d[kX] != 2) {
    throw std::invalid_argument("expected factor layout (A, B, C, X) with qubit A, B and X");
  }
}

double ent(const DensityOperator& rho, std::initializer_list<std::size_t> keep) {
  const std::vector<std::size_t> k(keep);
  return marginal_entropy(rho, k);
}

}  // namespace

ExactKeyRate exact_key_rate(const DensityOperator& rho_abcx, const ProbabilityTable& p_joint) {
  check_layout(rho_abcx);
  p_joint.validate();
  ExactKeyRate out;
  out.S_A_C = ent(rho_abcx, {kA, kC}) - ent(rho_abcx, {kC});
  out.S_A_CX = ent(rho_abcx, {kA, kC, kX}) - ent(rho_abcx, {kC, kX});
  const std::array<double, 2> p_b{p_joint.at("00") + p_joint.at("10"), p_joint.at("01") + p_joint.at("11")};
  out.H_A_B = shannon_entropy(p_joint) - shannon_entropy(p_b);
  out.rate_exact = out.S_A_C - out.H_A_B;
  if (out.S_A_C < out.S_A_CX - kSpectralTol) {
    throw std::logic_error("exact_key_rate: strong subadditivity violated; state is inconsistent");
  }
  return out;
}

std::optional<DensityOperator> conditional_server_state(const ExactRun& run, std::size_t x) {
  check_layout(run.rho_abcx);
  const std::array<std::size_t, 2> keep{kC, kX};
  const Matrix cx = partial_trace(run.rho_abcx.matrix(), run.rho_abcx.dims(), keep);
  const auto mem = static_cast<Eigen::Index>(run.rho_abcx.dims()[kC]);
  Matrix block(mem, mem);
  for (Eigen::Index r = 0; r < mem; ++r) {
    for (Eigen::Index c = 0; c < mem; ++c) block(r, c) = cx(r * 2 + static_cast<Eigen::Index>(x), c * 2 + static_cast<Eigen::Index>(x));
  }
  const double weight = block.trace().real();
  if (!(weight > kEmptyBlock)) return std::nullopt;
  return DensityOperator(block / weight, {static_cast<std::size_t>(mem)});
}

DecompositionReport verify_entropy_decompositions(const ExactRun& run) {
  const auto& rho = run.rho_abcx;
  const auto& s = run.stats;
  DecompositionReport rep;

  rep.acx_error = std::abs(ent(rho, {kA, kC, kX}) - shannon_entropy(s.joint_table()));

  rep.p_C = s.p_joint[0][0] + s.p_joint[1][1];
  rep.p_W = s.p_joint[0][1] + s.p_joint[1][0];
  const auto sigma_c = conditional_server_state(run, 0);
  const auto sigma_w = conditional_server_state(run, 1);
  std::vector<double> spectrum_c;
  if (sigma_c) {
    spectrum_c = eigenvalues_hermitian(*sigma_c);
    rep.S_sigma_C = entropy_of_spectrum(spectrum_c);
    rep.rank_sigma_C = numerical_rank(*sigma_c, kRankCutoff);
  }
  if (sigma_w) {
    rep.S_sigma_W = von_neumann_entropy(*sigma_w);
    rep.rank_sigma_W = numerical_rank(*sigma_w, kRankCutoff);
  }
  const std::array<double, 2> split{rep.p_C, rep.p_W};
  const double decomposed = shannon_entropy(split) + rep.p_C * rep.S_sigma_C + rep.p_W * rep.S_sigma_W;
  rep.cx_error = std::abs(ent(rho, {kC, kX}) - decomposed);

  if (sigma_c) {
    const double overlap_sq = std::norm(run.branch.overlap00_11);
    const auto [lp, lm] = lambda_plus_minus(s.alpha_sq[0][0], s.alpha_sq[1][1], s.F[0][0], s.F[1][1], overlap_sq);
    spectrum_c.resize(std::max<std::size_t>(spectrum_c.size(), 2), 0.0);
    rep.lambda_error = std::max(std::abs(lp - spectrum_c[0]), std::abs(lm - spectrum_c[1]));
  }
  return rep;
}

CertificationRecord certify_instance(const CertificationCase& c, const BoundOptions& options) {
  CertificationRecord rec;
  rec.id = c.id;
  try {
    const ExactRun run = run_exact(c.setup);
    KeyRateInputs in{run.stats, std::min(1.0, run.branch.h0_norm), EtaSource::measured_exact, true};
    rec.rate_bound = key_rate_bound(in, options).rate;
    double best = rec.rate_bound;
    if (c.symmetric_second_pass) {
      const auto& s = run.stats;
      const double f_neq = 0.5 * (s.F[0][1] + s.F[1][0]);
      KeyRateInputs sym{s, std::min(1.0, symmetric_eta(s.Q, s.p_w, f_neq)), EtaSource::scenario_derived, false};
      rec.rate_bound_symmetric = key_rate_bound(sym, options).rate;
      best = std::max(best, *rec.rate_bound_symmetric);
    }
    rec.rate_exact = exact_key_rate(run.rho_abcx, run.stats.joint_table()).rate_exact;
    rec.slack = rec.rate_exact - best;
    rec.checks_passed = verify_entropy_decompositions(run).pass();
  } catch (const AbortCondition& e) {
    rec.skipped = true;
    rec.reason = e.what();
  }
  return rec;
}

CertificationReport certify_dominance(std::span<const CertificationCase> cases, const BoundOptions& options) {
  CertificationReport rep;
  bool first = true;
  for (const auto& c : cases) {
    auto rec = certify_instance(c, options);
    if (rec.skipped) {
      ++rep.skipped;
    } else {
      if (rec.slack < -kDominanceTol || !rec.checks_passed) ++rep.violations;
      rep.worst_slack = first ? rec.slack : std::min(rep.worst_slack, rec.slack);
      first = false;
    }
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

std::vector<CertificationCase> random_attack_cases(std::size_t count, std::span<const std::size_t> ancilla_dims,
                                                   std::uint64_t base_seed) {
  if (ancilla_dims.empty()) throw std::invalid_argument("random_attack_cases: no ancilla dimensions");
  std::vector<CertificationCase> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t seed = base_seed + k;
    const std::size_t d_c = ancilla_dims[k % ancilla_dims.size()];
    // Every third instance adds a reverse channel so the dilation path is covered.
    std::optional<NoiseChannel> reverse;
    if (k % 3 == 2) reverse = NoiseChannel::depolarizing(0.05 * static_cast<double>(k % 7));
    out.push_back({"random-d" + std::to_string(d_c) + "-s" + std::to_string(seed),
                   ProtocolSetup{InitialState::random(seed ^ 0x5eed5eedULL),
                                 NoiseChannel::depolarizing(0.04 * static_cast<double>(k % 5)),
                                 random_attack(d_c, seed), reverse},
                   false});
  }
  return out;
}

std::vector<CertificationCase> semi_honest_cases(std::span<const double> noise) {
  std::vector<CertificationCase> out;
  for (double q : noise) {
    out.push_back({"semi-honest-q" + std::to_string(q),
                   ProtocolSetup{InitialState::bell_phi_plus(), NoiseChannel::depolarizing(q), semi_honest_attack(),
                                 NoiseChannel::depolarizing(q)},
                   false});
  }
  return out;
}

CertificationCase symmetric_adversarial_case(double Q, double p_w) {
  if (!(p_w >= 0.0 && p_w <= 0.25)) throw std::invalid_argument("symmetric_adversarial_case: p_w must lie in [0, 1/4]");
  if (!(Q >= 0.0 && Q < 1.0)) throw std::invalid_argument("symmetric_adversarial_case: Q must lie in [0, 1)");
  const double d = (1.0 - Q) / 2.0, o = Q / 2.0;
  return {"symmetric-Q" + std::to_string(Q) + "-pw" + std::to_string(p_w),
          ProtocolSetup{InitialState::from_probabilities({d, o, o, d}), NoiseChannel::identity(), semi_honest_attack(),
                        NoiseChannel::depolarizing(4.0 * p_w)},
          true};
}

std::vector<CertificationCase> default_certification_batch(std::size_t random_count, std::uint64_t base_seed) {
  const std::array<std::size_t, 2> dims{1, 2};
  auto batch = random_attack_cases(random_count, dims, base_seed);
  const std::array<double, 4> grid{0.0, 0.1, 0.2, 0.3};
  for (auto& c : semi_honest_cases(grid)) batch.push_back(std::move(c));
  for (auto [Q, pw] : {std::pair{0.1, 0.1}, {0.05, 0.05}, {0.02, 0.1}, {0.12, 0.12}}) {
    batch.push_back(symmetric_adversarial_case(Q, pw));
  }
  return batch;
}

}  // namespace msqkd
