#include "msqkd/hermitian_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace msqkd {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return s;
}

// One complex Jacobi rotation annihilating a(p, q), p < q. The rotation is a
// phase on column q (making a(p, q) real) followed by a real Givens rotation.
void rotate(Matrix& a, Eigen::Index p, Eigen::Index q) {
  const cplx apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const cplx e = apq / r;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * r);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const cplx ce = std::conj(e);

  // A <- A G with G_pp = c, G_pq = s, G_qp = -s conj(e), G_qq = c conj(e).
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * ce * akq;
    a(k, q) = s * akp + c * ce * akq;
  }
  // A <- G^dagger A.
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * e * aqk;
    a(q, k) = s * apk + c * e * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

std::vector<double> eigenvalues_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues_hermitian: matrix not square");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > kStructTol * scale) {
    throw std::invalid_argument("eigenvalues_hermitian: matrix is not Hermitian");
  }

  Matrix a = 0.5 * (m + m.adjoint());
  const double total = a.squaredNorm();
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm_sq(a) <= eps * eps * total) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        rotate(a, p, q);
      }
    }
  }

  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i).real();
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> eigenvalues_hermitian(const DensityOperator& rho) { return eigenvalues_hermitian(rho.matrix()); }

std::size_t numerical_rank(const DensityOperator& rho, double relative_cutoff) {
  const double cutoff = relative_cutoff * std::abs(rho.trace());
  const auto ev = eigenvalues_hermitian(rho);
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [&](double x) { return x > cutoff; }));
}

}  // namespace msqkd
