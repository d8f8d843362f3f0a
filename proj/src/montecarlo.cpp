#include "msqkd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace msqkd {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
// Stream offset separating disclosure draws from protocol draws.
constexpr std::uint64_t kDisclosureStream = 0xd15c105e00000000ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t choice_index(Choice a, Choice b) {
  return 2 * static_cast<std::size_t>(a == Choice::reflect) + static_cast<std::size_t>(b == Choice::reflect);
}

Matrix z_projector(std::optional<std::uint8_t> bit) {
  Matrix p = Matrix::Zero(2, 2);
  if (!bit) return Matrix::Identity(2, 2);
  p(*bit, *bit) = 1.0;
  return p;
}

IterationRecord sample_iteration(std::uint64_t k, double p_m, const OutcomeModel& model, std::uint64_t seed) {
  CounterRng rng(seed, k);
  IterationRecord r;
  r.iteration = k;
  r.a_choice = rng.uniform() < p_m ? Choice::measure : Choice::reflect;
  r.b_choice = rng.uniform() < p_m ? Choice::measure : Choice::reflect;
  const auto& outcomes = model.outcomes(r.a_choice, r.b_choice);
  const double u = rng.uniform();
  double acc = 0.0;
  const OutcomeModel::Outcome* picked = &outcomes.back();
  for (const auto& o : outcomes) {
    acc += o.probability;
    if (u < acc) {
      picked = &o;
      break;
    }
  }
  r.a_bit = picked->a_bit;
  r.b_bit = picked->b_bit;
  r.message = picked->message;
  r.accepted = r.a_choice == Choice::measure && r.b_choice == Choice::measure && r.message == Message::minus;
  return r;
}

}  // namespace

bool IterationRecord::consistent() const {
  const bool both_measure = a_choice == Choice::measure && b_choice == Choice::measure;
  if (accepted != (both_measure && message == Message::minus)) return false;
  if (a_bit.has_value() != (a_choice == Choice::measure)) return false;
  if (b_bit.has_value() != (b_choice == Choice::measure)) return false;
  return true;
}

std::uint64_t CounterRng::next() {
  return splitmix64(splitmix64(seed_ ^ splitmix64(stream_)) + (counter_++) * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

OutcomeModel OutcomeModel::from_setup(const ProtocolSetup& setup) {
  const Matrix transit = setup.transit_state().matrix();
  const Matrix gram = setup.effective_attack().f_gram();

  OutcomeModel model;
  for (Choice a : {Choice::measure, Choice::reflect}) {
    for (Choice b : {Choice::measure, Choice::reflect}) {
      std::vector<std::optional<std::uint8_t>> a_bits, b_bits;
      if (a == Choice::measure) a_bits = {0, 1}; else a_bits = {std::nullopt};
      if (b == Choice::measure) b_bits = {0, 1}; else b_bits = {std::nullopt};
      auto& out = model.by_choice[choice_index(a, b)];
      for (auto ab : a_bits) {
        for (auto bb : b_bits) {
          // Z measurement by each measuring user; the resent basis state
          // equals the projected state.
          const Matrix proj = kron(z_projector(ab), z_projector(bb));
          const Matrix sigma = proj * transit * proj;
          const double p_branch = sigma.trace().real();
          const double p_minus = std::clamp(minus_branch_weight(sigma, gram), 0.0, p_branch);
          out.push_back({ab, bb, Message::minus, p_minus});
          out.push_back({ab, bb, Message::plus, p_branch - p_minus});
        }
      }
    }
  }
  return model;
}

const std::vector<OutcomeModel::Outcome>& OutcomeModel::outcomes(Choice a, Choice b) const {
  return by_choice[choice_index(a, b)];
}

SimulationResult simulate_iterations(std::size_t n, double p_m, const ProtocolSetup& setup, std::uint64_t seed,
                                     unsigned partitions) {
  if (n == 0) throw std::invalid_argument("simulate_iterations: n must be at least 1");
  if (!(p_m > 0.0 && p_m <= 1.0)) throw std::invalid_argument("simulate_iterations: p_M must lie in (0, 1]");
  const OutcomeModel model = OutcomeModel::from_setup(setup);

  if (partitions == 0) partitions = std::max(1u, std::thread::hardware_concurrency());
  partitions = static_cast<unsigned>(std::min<std::size_t>(partitions, n));

  SimulationResult result;
  result.records.resize(n);
  std::vector<std::thread> workers;
  const std::size_t chunk = (n + partitions - 1) / partitions;
  for (unsigned t = 0; t < partitions; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi] {
      for (std::size_t k = lo; k < hi; ++k) result.records[k] = sample_iteration(k, p_m, model, seed);
    });
  }
  for (auto& w : workers) w.join();

  for (const auto& r : result.records) {
    if (!r.accepted) continue;
    ++result.accepted;
    result.key_a.push_back(*r.a_bit);
    result.key_b.push_back(*r.b_bit);
  }
  return result;
}

double hoeffding_half_width(std::size_t n, double delta) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

bool StatisticsEstimate::estimable() const {
  if (alpha_unestimable || p_w_unestimable || joint_unestimable) return false;
  for (const auto& row : F_unestimable) {
    for (bool b : row) {
      if (b) return false;
    }
  }
  return true;
}

StatisticsEstimate estimate_statistics(std::span<const IterationRecord> records, double disclosed_fraction,
                                       std::uint64_t seed, double delta) {
  if (!(disclosed_fraction > 0.0 && disclosed_fraction <= 1.0)) {
    throw std::invalid_argument("estimate_statistics: disclosed fraction must lie in (0, 1]");
  }
  StatisticsEstimate est;
  std::array<std::array<std::size_t, 2>, 2> minus_counts{};
  std::array<std::array<std::size_t, 2>, 2> accepted_counts{};
  std::size_t reflect_minus = 0;

  for (const auto& r : records) {
    if (disclosed_fraction < 1.0) {
      CounterRng rng(seed, kDisclosureStream ^ r.iteration);
      if (rng.uniform() >= disclosed_fraction) continue;
    }
    ++est.disclosed;
    if (r.a_choice == Choice::measure && r.b_choice == Choice::measure) {
      ++est.both_measure;
      ++est.pair_counts[*r.a_bit][*r.b_bit];
      if (r.message == Message::minus) {
        ++minus_counts[*r.a_bit][*r.b_bit];
        ++accepted_counts[*r.a_bit][*r.b_bit];
        ++est.accepted;
      }
    } else if (r.a_choice == Choice::reflect && r.b_choice == Choice::reflect) {
      ++est.both_reflect;
      if (r.message == Message::minus) ++reflect_minus;
    }
    // Mixed choices are discarded.
  }
  if (est.disclosed == 0) throw std::invalid_argument("estimate_statistics: no disclosed iterations");

  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  auto& pt = est.point;
  auto& hw = est.half_width;
  est.alpha_unestimable = est.both_measure == 0;
  est.p_w_unestimable = est.both_reflect == 0;
  est.joint_unestimable = est.accepted == 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      pt.alpha_sq[i][j] = ratio(est.pair_counts[i][j], est.both_measure);
      pt.F[i][j] = ratio(minus_counts[i][j], est.pair_counts[i][j]);
      pt.p_joint[i][j] = ratio(accepted_counts[i][j], est.accepted);
      est.F_unestimable[i][j] = est.pair_counts[i][j] == 0;
      hw.alpha_sq[i][j] = hoeffding_half_width(est.both_measure, delta);
      hw.F[i][j] = hoeffding_half_width(est.pair_counts[i][j], delta);
      hw.p_joint[i][j] = hoeffding_half_width(est.accepted, delta);
    }
  }
  pt.p_w = ratio(reflect_minus, est.both_reflect);
  pt.p_a = ratio(est.accepted, est.both_measure);
  pt.Q = pt.alpha_sq[0][1] + pt.alpha_sq[1][0];
  hw.p_w = hoeffding_half_width(est.both_reflect, delta);
  hw.p_a = hoeffding_half_width(est.both_measure, delta);
  hw.Q = hoeffding_half_width(est.both_measure, delta);
  return est;
}

namespace {

const char* choice_name(Choice c) { return c == Choice::measure ? "measure" : "reflect"; }

Choice parse_choice(const std::string& s) {
  if (s == "measure") return Choice::measure;
  if (s == "reflect") return Choice::reflect;
  throw std::runtime_error("records csv: bad choice '" + s + "'");
}

std::optional<std::uint8_t> parse_bit(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw std::runtime_error("records csv: bad bit '" + s + "'");
}

}  // namespace

void write_records_csv(std::ostream& os, std::span<const IterationRecord> records) {
  os << "iteration,a_choice,b_choice,a_bit,b_bit,message,accepted\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << choice_name(r.a_choice) << ',' << choice_name(r.b_choice) << ',';
    if (r.a_bit) os << static_cast<int>(*r.a_bit);
    os << ',';
    if (r.b_bit) os << static_cast<int>(*r.b_bit);
    os << ',' << (r.message == Message::minus ? "-1" : "+1") << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

std::vector<IterationRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "iteration,a_choice,b_choice,a_bit,b_bit,message,accepted") {
    throw std::runtime_error("records csv: missing or unexpected header");
  }
  std::vector<IterationRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 7) throw std::runtime_error("records csv: expected 7 fields in '" + line + "'");
    IterationRecord r;
    r.iteration = std::stoull(fields[0]);
    r.a_choice = parse_choice(fields[1]);
    r.b_choice = parse_choice(fields[2]);
    r.a_bit = parse_bit(fields[3]);
    r.b_bit = parse_bit(fields[4]);
    if (fields[5] == "-1") {
      r.message = Message::minus;
    } else if (fields[5] == "+1") {
      r.message = Message::plus;
    } else {
      throw std::runtime_error("records csv: bad message '" + fields[5] + "'");
    }
    if (fields[6] != "0" && fields[6] != "1") throw std::runtime_error("records csv: bad accepted flag");
    r.accepted = fields[6] == "1";
    out.push_back(r);
  }
  return out;
}

}  // namespace msqkd
