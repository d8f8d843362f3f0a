#pragma once

#include <span>
#include <string>
#include <vector>

#include "msqkd/linalg.hpp"

namespace msqkd {

/// Labelled probabilities, e.g. the raw-key distribution {"00": p(0,0), ...}.
struct ProbabilityTable {
  struct Entry {
    std::string label;
    double p;
  };
  std::vector<Entry> entries;
  bool complete = true;

  /// Throws std::invalid_argument when an entry is outside [0,1] or, for a
  /// complete table, the entries do not sum to 1 within kStructTol.
  void validate() const;
  std::vector<double> values() const;
  double at(const std::string& label) const;
};

// All entropies are in bits.

/// h(x) = H(x, 1 - x). Throws std::domain_error outside [0,1].
double binary_entropy(double x);
/// H(p_1..p_n) with 0 log 0 = 0. Entries must lie in [0,1]; no sum check.
double shannon_entropy(std::span<const double> p);
double shannon_entropy(const ProbabilityTable& table);

/// S(rho) = -sum lambda log2 lambda with eigenvalues clipped to [0,1].
double von_neumann_entropy(const DensityOperator& rho);
/// Same for an eigenvalue list that is already known.
double entropy_of_spectrum(std::span<const double> eigenvalues);

/// S(rho restricted to `factors`).
double marginal_entropy(const DensityOperator& rho, std::span<const std::size_t> factors);

/// S(A|B) = S(AB) - S(B) on the marginal over a ∪ b. Throws
/// std::invalid_argument when the sets overlap or a is empty.
double conditional_entropy(const DensityOperator& rho, std::span<const std::size_t> a,
                           std::span<const std::size_t> b);

}  // namespace msqkd
