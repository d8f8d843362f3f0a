#include "msqkd/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msqkd/hermitian_eigen.hpp"

namespace msqkd {

namespace {

void check_probability(double p) {
  if (!(p >= -kStructTol && p <= 1.0 + kStructTol)) {
    throw std::domain_error("probability outside [0,1]: " + std::to_string(p));
  }
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

void ProbabilityTable::validate() const {
  double sum = 0.0;
  for (const auto& e : entries) {
    if (!(e.p >= 0.0 && e.p <= 1.0)) throw std::invalid_argument("ProbabilityTable: entry '" + e.label + "' outside [0,1]");
    sum += e.p;
  }
  if (complete && std::abs(sum - 1.0) > kStructTol) throw std::invalid_argument("ProbabilityTable: entries do not sum to 1");
}

std::vector<double> ProbabilityTable::values() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const auto& e : entries) v.push_back(e.p);
  return v;
}

double ProbabilityTable::at(const std::string& label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e.p;
  }
  throw std::out_of_range("ProbabilityTable: no entry '" + label + "'");
}

double binary_entropy(double x) {
  check_probability(x);
  x = std::clamp(x, 0.0, 1.0);
  return -plogp(x) - plogp(1.0 - x);
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    check_probability(x);
    h -= plogp(std::clamp(x, 0.0, 1.0));
  }
  return h;
}

double shannon_entropy(const ProbabilityTable& table) {
  const auto v = table.values();
  return shannon_entropy(v);
}

double entropy_of_spectrum(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues) s -= plogp(std::clamp(l, 0.0, 1.0));
  return s;
}

double von_neumann_entropy(const DensityOperator& rho) {
  const auto ev = eigenvalues_hermitian(rho);
  return entropy_of_spectrum(ev);
}

double marginal_entropy(const DensityOperator& rho, std::span<const std::size_t> factors) {
  if (factors.size() == rho.dims().size()) return von_neumann_entropy(rho);
  return von_neumann_entropy(partial_trace(rho, factors));
}

double conditional_entropy(const DensityOperator& rho, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty()) throw std::invalid_argument("conditional_entropy: empty conditioned set");
  for (auto x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw std::invalid_argument("conditional_entropy: factor sets overlap");
    }
  }
  std::vector<std::size_t> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  const double s_ab = marginal_entropy(rho, ab);
  const double s_b = b.empty() ? 0.0 : marginal_entropy(rho, b);
  return s_ab - s_b;
}

}  // namespace msqkd
