#include "msqkd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "msqkd/hermitian_eigen.hpp"

namespace msqkd {

std::size_t dims_product(const Dims& dims) {
  std::size_t n = 1;
  for (auto d : dims) {
    if (d == 0) throw std::invalid_argument("tensor factor of dimension 0");
    n *= d;
  }
  return n;
}

StateVector::StateVector(Vector amplitudes, Dims dims) : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (dims_product(dims_) != static_cast<std::size_t>(amps_.size())) {
    throw std::invalid_argument("StateVector: dims product " + std::to_string(dims_product(dims_)) +
                                " != amplitude count " + std::to_string(amps_.size()));
  }
}

StateVector StateVector::basis(const Dims& dims, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims_product(dims)));
  if (index >= static_cast<std::size_t>(v.size())) throw std::out_of_range("StateVector::basis index");
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return {std::move(v), dims};
}

StateVector StateVector::zero(const Dims& dims) {
  return {Vector::Zero(static_cast<Eigen::Index>(dims_product(dims))), dims};
}

bool StateVector::is_normalized(double tol) const { return std::abs(squared_norm() - 1.0) <= tol; }

cplx StateVector::inner(const StateVector& other) const {
  if (other.size() != size()) throw std::invalid_argument("StateVector::inner: size mismatch");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

Matrix StateVector::projector() const { return amps_ * amps_.adjoint(); }

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_defect: matrix not square");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityOperator::DensityOperator(Matrix matrix, Dims dims, Trusted) : m_(std::move(matrix)), dims_(std::move(dims)) {}

DensityOperator::DensityOperator(Matrix matrix, Dims dims) : m_(std::move(matrix)), dims_(std::move(dims)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityOperator: matrix not square");
  if (dims_product(dims_) != static_cast<std::size_t>(m_.rows())) {
    throw std::invalid_argument("DensityOperator: dims do not match matrix size");
  }
  if (hermiticity_defect(m_) > kStructTol) throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(m_.trace() - cplx{1.0, 0.0}) > kStructTol) {
    throw std::invalid_argument("DensityOperator: trace differs from 1");
  }
  // Exact Hermitian symmetrization keeps later spectral checks clean.
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  const auto ev = eigenvalues_hermitian(m_);
  if (!ev.empty() && ev.back() < -kSpectralTol) {
    throw std::invalid_argument("DensityOperator: negative eigenvalue " + std::to_string(ev.back()));
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  if (!psi.is_normalized()) throw std::invalid_argument("DensityOperator::pure: state not normalized");
  return {psi.projector(), psi.dims()};
}

DensityOperator DensityOperator::maximally_mixed(const Dims& dims) {
  const auto n = static_cast<Eigen::Index>(dims_product(dims));
  return {Matrix::Identity(n, n) / static_cast<double>(n), dims};
}

DensityOperator DensityOperator::diagonal(std::span<const double> probabilities, Dims dims) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(probabilities.size()),
                          static_cast<Eigen::Index>(probabilities.size()));
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = probabilities[i];
  }
  return {std::move(m), std::move(dims)};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace {

Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

StateVector tensor(const StateVector& a, const StateVector& b) {
  return {kron(a.amplitudes(), b.amplitudes()), concat(a.dims(), b.dims())};
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return {kron(a.matrix(), b.matrix()), concat(a.dims(), b.dims()), DensityOperator::Trusted{}};
}

Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const std::size_t total = dims_product(dims);
  if (static_cast<std::size_t>(m.rows()) != total || m.rows() != m.cols()) {
    throw std::invalid_argument("partial_trace: matrix does not match dims");
  }
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) {
    if (k >= dims.size()) throw std::invalid_argument("partial_trace: factor index out of range");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate factor index");
    kept[k] = true;
  }

  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  for (std::size_t f = 0; f < dims.size(); ++f) (kept[f] ? kept_dim : traced_dim) *= dims[f];

  // Split every flat index into (kept part, traced part), row-major in each.
  std::vector<std::size_t> kept_idx(total), traced_idx(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t k = 0, t = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (kept[f]) {
        k = k * dims[f] + digit[f];
      } else {
        t = t * dims[f] + digit[f];
      }
    }
    kept_idx[flat] = k;
    traced_idx[flat] = t;
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digit[f] < dims[f]) break;
      digit[f] = 0;
    }
  }

  std::vector<std::vector<std::size_t>> by_traced(traced_dim);
  for (std::size_t flat = 0; flat < total; ++flat) by_traced[traced_idx[flat]].push_back(flat);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (const auto& group : by_traced) {
    for (auto r : group) {
      for (auto c : group) {
        out(static_cast<Eigen::Index>(kept_idx[r]), static_cast<Eigen::Index>(kept_idx[c])) +=
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
  Matrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  Dims kept_dims;
  for (auto k : sorted) kept_dims.push_back(rho.dims()[k]);
  return {std::move(reduced), std::move(kept_dims), DensityOperator::Trusted{}};
}

}  // namespace msqkd
