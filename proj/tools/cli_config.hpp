#pragma once

// Option registration and scenario construction for the msqkd command line.
// Every option is registered on the top-level app so one flat key = value
// config file covers all subcommands; flags on the command line win.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "msqkd/keyrate.hpp"
#include "msqkd/protocol.hpp"

namespace msqkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAbort = 2;
inline constexpr int kExitUsage = 3;
inline constexpr int kExitCertification = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { keyrate, sweep, simulate, verify };

struct Config {
  std::string scenario;

  // semi-honest
  double p = 0.0;
  double q = 0.0;

  // symmetric-adversarial
  double Q = 0.0;
  double p_w = 0.0;
  std::string f_rule = "acceptance";
  double p_tilde_a = 0.5;
  double F_eq = 0.0;
  double F_neq = 0.0;

  // random-attack
  std::size_t d_C = 1;
  std::uint64_t attack_seed = 1;
  double fwd = 0.0;
  double rev = 0.0;
  std::string init = "phi-plus";
  std::uint64_t init_seed = 1;

  // custom: alpha_sq and F in the order 00, 01, 10, 11
  std::array<double, 4> alpha_sq{};
  std::array<double, 4> F{};
  double eta = 0.0;
  bool exact_equality = false;

  // sweep
  double start = 0.0;
  double stop = 0.25;
  double step = 0.0025;
  std::string coupling;

  // Monte Carlo
  std::size_t n = 0;
  double p_M = 1.0;
  std::uint64_t seed = 1;
  double disclosed_fraction = 1.0;
  unsigned partitions = 0;

  // verify
  std::size_t batch_size = 500;
  std::uint64_t batch_seed = 1;
  bool debug_halve_lambda = false;

  // outputs
  std::string out;
  std::string summary;
  std::string records;
};

void register_options(CLI::App& app, Config& cfg);

/// Rejects out-of-range values and options that belong to another scenario
/// or another subcommand. Throws UsageError.
void validate(const CLI::App& app, const Config& cfg, Command cmd);

/// Bound inputs of a single scenario point.
KeyRateInputs scenario_inputs(const Config& cfg);

/// Physical pipeline for scenarios that have one (semi-honest, random-attack).
ProtocolSetup physical_setup(const Config& cfg);
bool has_physical_setup(const Config& cfg);

/// The Q-indexed family selected by the coupling rule.
ScenarioFamily sweep_family(const Config& cfg);
std::string effective_coupling(const Config& cfg);

/// Q_k = start + k step for every Q_k <= stop (with a 1e-9 step tolerance).
std::vector<double> sweep_grid(const Config& cfg);

}  // namespace msqkd::cli
