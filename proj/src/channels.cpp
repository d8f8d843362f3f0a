#include "msqkd/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msqkd {

NoiseChannel NoiseChannel::identity(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("NoiseChannel: dimension 0");
  return {Kind::identity, dim, 0.0, {}};
}

NoiseChannel NoiseChannel::depolarizing(double p, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("NoiseChannel: dimension 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing parameter outside [0,1]");
  return {Kind::depolarizing, dim, p, {}};
}

NoiseChannel NoiseChannel::kraus(std::vector<Matrix> operators) {
  if (operators.empty()) throw std::invalid_argument("NoiseChannel::kraus: no operators");
  const auto n = operators.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& k : operators) {
    if (k.rows() != n || k.cols() != n) throw std::invalid_argument("NoiseChannel::kraus: operator shape mismatch");
    sum += k.adjoint() * k;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kSpectralTol) {
    throw std::invalid_argument("NoiseChannel::kraus: operators are not trace preserving");
  }
  return {Kind::kraus, static_cast<std::size_t>(n), 0.0, std::move(operators)};
}

Matrix NoiseChannel::apply(const Matrix& m) const {
  if (static_cast<std::size_t>(m.rows()) != dim_ || m.rows() != m.cols()) {
    throw std::invalid_argument("NoiseChannel::apply: dimension mismatch");
  }
  switch (kind_) {
    case Kind::identity:
      return m;
    case Kind::depolarizing: {
      const auto n = static_cast<Eigen::Index>(dim_);
      return (1.0 - p_) * m + (p_ / static_cast<double>(dim_)) * m.trace() * Matrix::Identity(n, n);
    }
    case Kind::kraus: {
      Matrix out = Matrix::Zero(m.rows(), m.cols());
      for (const auto& k : ops_) out += k * m * k.adjoint();
      return out;
    }
  }
  throw std::logic_error("NoiseChannel: unknown kind");
}

DensityOperator NoiseChannel::apply(const DensityOperator& rho) const {
  if (rho.dim() != dim_) throw std::invalid_argument("NoiseChannel::apply: dimension mismatch");
  return {apply(rho.matrix()), rho.dims()};
}

Matrix weyl_operator(std::size_t dim, std::size_t shift, std::size_t clock) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < dim; ++j) {
    // X^a Z^b |j> = omega^{b j} |j + a mod d>
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((clock * j) % dim) / static_cast<double>(dim);
    w(static_cast<Eigen::Index>((j + shift) % dim), static_cast<Eigen::Index>(j)) = std::polar(1.0, angle);
  }
  return w;
}

std::vector<Matrix> NoiseChannel::kraus_operators() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  switch (kind_) {
    case Kind::identity:
      return {Matrix::Identity(n, n)};
    case Kind::depolarizing: {
      // (1 - p) rho + p I/d = (1 - p) rho + (p / d^2) sum_{a,b} W_ab rho W_ab^dagger
      const double d2 = static_cast<double>(dim_ * dim_);
      std::vector<Matrix> ops;
      ops.push_back(std::sqrt(1.0 - p_ + p_ / d2) * Matrix::Identity(n, n));
      if (p_ > 0.0) {
        const double w = std::sqrt(p_ / d2);
        for (std::size_t a = 0; a < dim_; ++a) {
          for (std::size_t b = 0; b < dim_; ++b) {
            if (a == 0 && b == 0) continue;
            ops.push_back(w * weyl_operator(dim_, a, b));
          }
        }
      }
      return ops;
    }
    case Kind::kraus:
      return ops_;
  }
  throw std::logic_error("NoiseChannel: unknown kind");
}

NoiseChannel compose(const NoiseChannel& a, const NoiseChannel& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compose: dimension mismatch");
  using Kind = NoiseChannel::Kind;
  if (a.kind() == Kind::identity) return b;
  if (b.kind() == Kind::identity) return a;
  if (a.kind() == Kind::depolarizing && b.kind() == Kind::depolarizing) {
    return NoiseChannel::depolarizing(1.0 - (1.0 - a.parameter()) * (1.0 - b.parameter()), a.dim());
  }
  std::vector<Matrix> ops;
  for (const auto& kb : b.kraus_operators()) {
    for (const auto& ka : a.kraus_operators()) ops.push_back(kb * ka);
  }
  return NoiseChannel::kraus(std::move(ops));
}

}  // namespace msqkd
