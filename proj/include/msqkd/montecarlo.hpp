#pragma once

// Multi-iteration sampling of the protocol and finite-sample parameter
// estimation. Outcome probabilities come from the exact pipeline; only the
// choice of which outcome occurs is random.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "msqkd/protocol.hpp"

namespace msqkd {

enum class Choice : std::uint8_t { measure, reflect };
enum class Message : std::int8_t { plus = 1, minus = -1 };

struct IterationRecord {
  std::uint64_t iteration = 0;
  Choice a_choice = Choice::reflect;
  Choice b_choice = Choice::reflect;
  std::optional<std::uint8_t> a_bit;
  std::optional<std::uint8_t> b_bit;
  Message message = Message::plus;
  bool accepted = false;

  /// accepted <=> both measured and the message was -1; bits present exactly
  /// for the measuring parties.
  bool consistent() const;
  bool operator==(const IterationRecord&) const = default;
};

/// Counter-based generator: the k-th draw of stream s under seed x is a pure
/// function of (x, s, k), so every iteration owns an independent stream and
/// any partition of the iteration range reproduces the same draws.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Exact joint distribution of (bits, message) for each pair of choices.
struct OutcomeModel {
  struct Outcome {
    std::optional<std::uint8_t> a_bit;
    std::optional<std::uint8_t> b_bit;
    Message message;
    double probability;
  };
  /// Indexed by 2 * (a reflects) + (b reflects).
  std::array<std::vector<Outcome>, 4> by_choice;

  static OutcomeModel from_setup(const ProtocolSetup& setup);
  const std::vector<Outcome>& outcomes(Choice a, Choice b) const;
};

struct SimulationResult {
  std::vector<IterationRecord> records;
  std::vector<std::uint8_t> key_a;
  std::vector<std::uint8_t> key_b;
  std::size_t accepted = 0;
};

/// Runs n iterations; each user measures with probability p_m. Work is split
/// into `partitions` contiguous ranges (0 = hardware concurrency) and merged in
/// iteration order, so the result does not depend on the partition count.
/// Throws std::invalid_argument for n = 0 or p_m outside (0, 1].
SimulationResult simulate_iterations(std::size_t n, double p_m, const ProtocolSetup& setup, std::uint64_t seed,
                                     unsigned partitions = 0);

/// Hoeffding half-width sqrt(ln(2 / delta) / (2 n)) for a mean of n samples in
/// [0,1]; +infinity for n = 0.
double hoeffding_half_width(std::size_t n, double delta = 1e-6);

struct StatisticsEstimate {
  ObservedStatistics point;  // disclosed-sample frequencies
  ObservedStatistics half_width;

  std::size_t disclosed = 0;
  std::size_t both_measure = 0;
  std::size_t both_reflect = 0;
  std::size_t accepted = 0;
  std::array<std::array<std::size_t, 2>, 2> pair_counts{};

  std::array<std::array<bool, 2>, 2> F_unestimable{};
  bool p_w_unestimable = false;
  bool alpha_unestimable = false;  // no disclosed both-measure iteration
  bool joint_unestimable = false;  // no disclosed accepted iteration

  bool estimable() const;
};

/// Point estimates and Hoeffding half-widths (confidence 1 - delta) from the
/// disclosed subset. An iteration is disclosed when the uniform draw of its
/// disclosure stream falls below `disclosed_fraction`. Throws
/// std::invalid_argument when the fraction is outside (0, 1] or no record is
/// disclosed.
StatisticsEstimate estimate_statistics(std::span<const IterationRecord> records, double disclosed_fraction,
                                       std::uint64_t seed = 0, double delta = 1e-6);

// Raw-run export: header then one record per line,
// iteration,a_choice,b_choice,a_bit,b_bit,message,accepted
void write_records_csv(std::ostream& os, std::span<const IterationRecord> records);
/// Throws std::runtime_error on malformed input.
std::vector<IterationRecord> read_records_csv(std::istream& is);

}  // namespace msqkd
