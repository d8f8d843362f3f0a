#pragma once

#include <vector>

#include "msqkd/linalg.hpp"

namespace msqkd {

/// Noise on the transit system. The depolarizing form is applied directly as
/// (1 - p) rho + p I / d; Kraus operators are produced on demand for dilation.
class NoiseChannel {
 public:
  enum class Kind { identity, depolarizing, kraus };

  static NoiseChannel identity(std::size_t dim = 4);
  /// Throws std::invalid_argument unless p is in [0,1].
  static NoiseChannel depolarizing(double p, std::size_t dim = 4);
  /// Throws std::invalid_argument when the operators are not square of equal
  /// size or sum K^dagger K deviates from I by more than kSpectralTol.
  static NoiseChannel kraus(std::vector<Matrix> operators);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  /// Depolarizing parameter; 0 for identity, unspecified for kraus.
  double parameter() const { return p_; }

  /// Throws std::invalid_argument on dimension mismatch.
  DensityOperator apply(const DensityOperator& rho) const;
  Matrix apply(const Matrix& m) const;

  /// A Kraus decomposition of the map. Depolarizing channels use the
  /// Weyl-Heisenberg (clock and shift) unitaries; zero-weight terms are dropped.
  std::vector<Matrix> kraus_operators() const;

 private:
  NoiseChannel(Kind kind, std::size_t dim, double p, std::vector<Matrix> ops)
      : kind_(kind), dim_(dim), p_(p), ops_(std::move(ops)) {}

  Kind kind_;
  std::size_t dim_;
  double p_;
  std::vector<Matrix> ops_;
};

/// The map rho -> b(a(rho)). Two depolarizing channels compose into a
/// depolarizing channel with parameter 1 - (1 - p_a)(1 - p_b).
NoiseChannel compose(const NoiseChannel& a, const NoiseChannel& b);

/// Weyl-Heisenberg operator X^a Z^b on C^d.
Matrix weyl_operator(std::size_t dim, std::size_t shift, std::size_t clock);

}  // namespace msqkd
