#pragma once

#include <vector>

#include "msqkd/linalg.hpp"

namespace msqkd {

/// Eigenvalues of a Hermitian matrix in descending order, via cyclic complex
/// Jacobi rotations. Throws std::invalid_argument if `m` is not square or its
/// Hermiticity defect exceeds kStructTol scaled by max(1, max |m_ij|).
std::vector<double> eigenvalues_hermitian(const Matrix& m);
std::vector<double> eigenvalues_hermitian(const DensityOperator& rho);

/// Number of eigenvalues above `relative_cutoff * trace`.
std::size_t numerical_rank(const DensityOperator& rho, double relative_cutoff = 1e-8);

}  // namespace msqkd
