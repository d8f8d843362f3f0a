#include "msqkd/attacks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace msqkd {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Dims branch_dims(std::size_t d_c) { return {2, 2, d_c}; }

Matrix gram(const std::array<StateVector, 4>& v) {
  Matrix g(4, 4);
  for (Eigen::Index k = 0; k < 4; ++k) {
    for (Eigen::Index l = 0; l < 4; ++l) {
      g(k, l) = v[static_cast<std::size_t>(k)].inner(v[static_cast<std::size_t>(l)]);
    }
  }
  return g;
}

// sum_k c_k v_k for Bell coefficients c.
StateVector combine(const StateVector& bell, const std::array<StateVector, 4>& v) {
  Vector out = Vector::Zero(v[0].amplitudes().size());
  for (std::size_t k = 0; k < 4; ++k) out += bell.amplitudes()(static_cast<Eigen::Index>(k)) * v[k].amplitudes();
  return {std::move(out), v[0].dims()};
}

}  // namespace

StateVector bell_state(std::size_t k) {
  Vector v = Vector::Zero(4);
  switch (k) {
    case 0: v << kInvSqrt2, 0.0, 0.0, kInvSqrt2; break;
    case 1: v << kInvSqrt2, 0.0, 0.0, -kInvSqrt2; break;
    case 2: v << 0.0, kInvSqrt2, kInvSqrt2, 0.0; break;
    case 3: v << 0.0, kInvSqrt2, -kInvSqrt2, 0.0; break;
    default: throw std::out_of_range("bell_state: index must be 0..3");
  }
  return {std::move(v), {2, 2}};
}

InitialState::InitialState(const std::array<cplx, 4>& amplitudes) : alpha(amplitudes) {
  double norm = 0.0;
  for (const auto& a : alpha) norm += std::norm(a);
  if (std::abs(norm - 1.0) > kStructTol) throw std::invalid_argument("InitialState: amplitudes not normalized");
}

InitialState InitialState::bell_phi_plus() { return InitialState({kInvSqrt2, 0.0, 0.0, kInvSqrt2}); }

InitialState InitialState::from_probabilities(const std::array<double, 4>& p) {
  std::array<cplx, 4> a{};
  for (std::size_t k = 0; k < 4; ++k) {
    if (!(p[k] >= 0.0)) throw std::invalid_argument("InitialState: negative probability");
    a[k] = std::sqrt(p[k]);
  }
  return InitialState(a);
}

InitialState InitialState::random(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<cplx, 4> a{};
  double norm = 0.0;
  for (auto& x : a) {
    x = {normal(gen), normal(gen)};
    norm += std::norm(x);
  }
  for (auto& x : a) x /= std::sqrt(norm);
  return InitialState(a);
}

StateVector InitialState::state() const {
  Vector v(4);
  for (std::size_t k = 0; k < 4; ++k) v(static_cast<Eigen::Index>(k)) = alpha[k];
  return {std::move(v), {2, 2}};
}

DensityOperator InitialState::density() const { return DensityOperator::pure(state()); }

AttackOperator::AttackOperator(std::size_t ancilla_dim, std::array<StateVector, 4> e, std::array<StateVector, 4> f)
    : d_c_(ancilla_dim), e_(std::move(e)), f_(std::move(f)) {
  if (d_c_ == 0) throw std::invalid_argument("AttackOperator: ancilla dimension 0");
  const Dims expected = branch_dims(d_c_);
  for (std::size_t k = 0; k < 4; ++k) {
    if (e_[k].dims() != expected || f_[k].dims() != expected) {
      throw std::invalid_argument("AttackOperator: branch vector dims must be {2, 2, d_C}");
    }
  }
}

Matrix AttackOperator::f_gram() const { return gram(f_); }
Matrix AttackOperator::e_gram() const { return gram(e_); }

BellBranches bell_branches(const AttackOperator& u) {
  BellBranches out{{u.e_branches()}, {u.f_branches()}};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto phi = bell_state(k);
    out.g[k] = combine(phi, u.e_branches());
    out.h[k] = combine(phi, u.f_branches());
  }
  return out;
}

AttackOperator semi_honest_attack() {
  constexpr std::size_t d_c = 4;
  const Dims dims = branch_dims(d_c);
  std::array<StateVector, 4> e{StateVector::zero(dims), StateVector::zero(dims), StateVector::zero(dims),
                               StateVector::zero(dims)};
  std::array<StateVector, 4> f = e;
  for (std::size_t ij = 0; ij < 4; ++ij) {
    Vector ev = Vector::Zero(16);
    Vector fv = Vector::Zero(16);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto phi = bell_state(k);
      // <phi_k|ij> is real for the Bell basis.
      const cplx amp = std::conj(phi.amplitudes()(static_cast<Eigen::Index>(ij)));
      const StateVector pointer = StateVector::basis({d_c}, k);
      const Vector branch = kron(phi.amplitudes(), pointer.amplitudes());
      (k == 1 ? fv : ev) += amp * branch;
    }
    e[ij] = StateVector(std::move(ev), dims);
    f[ij] = StateVector(std::move(fv), dims);
  }
  return {d_c, std::move(e), std::move(f)};
}

AttackOperator random_attack(std::size_t ancilla_dim, std::uint64_t seed) {
  if (ancilla_dim == 0) throw std::invalid_argument("random_attack: d_C must be at least 1");
  const auto half = static_cast<Eigen::Index>(4 * ancilla_dim);
  const Eigen::Index n = 2 * half;

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(n, 4);
  for (Eigen::Index c = 0; c < 4; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) g(r, c) = cplx{normal(gen), normal(gen)};
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, 4);
  const Matrix r = qr.matrixQR().topLeftCorner(4, 4).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < 4; ++c) {
    const cplx d = r(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }

  const Dims dims = branch_dims(ancilla_dim);
  std::array<StateVector, 4> e{StateVector::zero(dims), StateVector::zero(dims), StateVector::zero(dims),
                               StateVector::zero(dims)};
  std::array<StateVector, 4> f = e;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    e[k] = StateVector(q.col(col).head(half), dims);
    f[k] = StateVector(q.col(col).tail(half), dims);
  }
  return {ancilla_dim, std::move(e), std::move(f)};
}

AttackOperator absorb_channel(const NoiseChannel& pre, const AttackOperator& u) {
  if (pre.dim() != 4) throw std::invalid_argument("absorb_channel: channel must act on the two transit qubits");
  const auto kraus = pre.kraus_operators();
  const std::size_t m = kraus.size();
  const std::size_t d_c = u.ancilla_dim() * m;
  const Dims dims = branch_dims(d_c);
  const auto inner = static_cast<Eigen::Index>(4 * u.ancilla_dim());

  auto dilate = [&](const std::array<StateVector, 4>& branches) {
    std::array<StateVector, 4> out{StateVector::zero(dims), StateVector::zero(dims), StateVector::zero(dims),
                                   StateVector::zero(dims)};
    for (std::size_t ij = 0; ij < 4; ++ij) {
      Vector v = Vector::Zero(inner * static_cast<Eigen::Index>(m));
      for (std::size_t mu = 0; mu < m; ++mu) {
        // sum_kl K_mu(kl, ij) b_kl  at environment index mu
        Vector acc = Vector::Zero(inner);
        for (std::size_t kl = 0; kl < 4; ++kl) {
          acc += kraus[mu](static_cast<Eigen::Index>(kl), static_cast<Eigen::Index>(ij)) * branches[kl].amplitudes();
        }
        for (Eigen::Index x = 0; x < inner; ++x) v(x * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(mu)) = acc(x);
      }
      out[ij] = StateVector(std::move(v), dims);
    }
    return out;
  };
  return {d_c, dilate(u.e_branches()), dilate(u.f_branches())};
}

UnitarityReport validate_unitarity(const AttackOperator& u) {
  const Matrix g = u.e_gram() + u.f_gram();
  UnitarityReport report;
  report.max_deviation = (g - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff();
  report.pass = report.max_deviation <= kSpectralTol;
  return report;
}

BranchStatistics branch_statistics(const AttackOperator& u, const std::optional<NoiseChannel>& pre_reverse) {
  if (pre_reverse) return branch_statistics(absorb_channel(*pre_reverse, u));
  BranchStatistics s;
  for (std::size_t k = 0; k < 4; ++k) s.F[k] = u.f_branches()[k].squared_norm();
  s.overlap00_11 = u.f(0, 0).inner(u.f(1, 1));
  const Vector h0 = kInvSqrt2 * (u.f(0, 0).amplitudes() + u.f(1, 1).amplitudes());
  s.h0_norm = h0.squaredNorm();
  return s;
}

}  // namespace msqkd
