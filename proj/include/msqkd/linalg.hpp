#pragma once

// Dense complex state and operator types over tensor-factored Hilbert spaces.
//
// Basis ordering is row-major: the leftmost tensor factor is the most
// significant digit of a flat index. For dims {2, 2, d} the basis element
// |a, b, c> sits at index (a * 2 + b) * d + c. Every module relies on this.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace msqkd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

// Tolerance for structural checks such as Hermiticity and unit trace.
inline constexpr double kStructTol = 1e-12;
// Spectral tolerance (eigenvalue sums, positivity).
inline constexpr double kSpectralTol = 1e-10;

std::size_t dims_product(const Dims& dims);

/// Amplitudes over a computational basis together with the tensor factor
/// dimensions. Branch vectors of an attack are allowed to be sub-normalized,
/// so normalization is a query rather than an invariant.
class StateVector {
 public:
  StateVector(Vector amplitudes, Dims dims);

  static StateVector basis(const Dims& dims, std::size_t index);
  static StateVector zero(const Dims& dims);

  const Vector& amplitudes() const { return amps_; }
  const Dims& dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }

  double squared_norm() const { return amps_.squaredNorm(); }
  bool is_normalized(double tol = kStructTol) const;

  cplx inner(const StateVector& other) const;  // <this|other>
  Matrix projector() const;                    // |v><v|, not renormalized

 private:
  Vector amps_;
  Dims dims_;
};

/// Positive-semidefinite operator of unit trace. The constructor rejects any
/// other matrix with std::invalid_argument.
class DensityOperator {
 public:
  DensityOperator(Matrix matrix, Dims dims);

  static DensityOperator pure(const StateVector& psi);
  static DensityOperator maximally_mixed(const Dims& dims);
  /// Diagonal operator; entries must be a probability vector.
  static DensityOperator diagonal(std::span<const double> probabilities, Dims dims);

  const Matrix& matrix() const { return m_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  double trace() const { return m_.trace().real(); }

 private:
  struct Trusted {};
  DensityOperator(Matrix matrix, Dims dims, Trusted);

  friend DensityOperator partial_trace(const DensityOperator&, std::span<const std::size_t>);
  friend DensityOperator tensor(const DensityOperator&, const DensityOperator&);

  Matrix m_;
  Dims dims_;
};

/// Max |m - m^dagger| entry.
double hermiticity_defect(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

StateVector tensor(const StateVector& a, const StateVector& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Traces out every factor not listed in `keep`. The result carries the kept
/// factors in their original order. Throws std::invalid_argument on an empty
/// or out-of-range keep set.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep);

/// Same contraction on an arbitrary square matrix (no positivity or trace
/// requirements), for sub-normalized intermediate operators.
Matrix partial_trace(const Matrix& m, const Dims& dims, std::span<const std::size_t> keep);

}  // namespace msqkd
