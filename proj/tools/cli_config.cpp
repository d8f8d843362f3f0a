#include "cli_config.hpp"

#include <cmath>
#include <map>
#include <set>

#include "msqkd/attacks.hpp"

namespace msqkd::cli {

namespace {

const std::set<std::string> kScenarios{"semi-honest", "symmetric-adversarial", "random-attack", "custom"};

// Options owned by one scenario; giving them to another is a usage error.
const std::map<std::string, std::set<std::string>> kScenarioOptions{
    {"semi-honest", {"--p", "--q"}},
    {"symmetric-adversarial", {"--Q", "--p_w", "--f_rule", "--p_tilde_a", "--F_eq", "--F_neq"}},
    {"random-attack", {"--d_C", "--attack_seed", "--fwd", "--rev", "--init", "--init_seed"}},
    {"custom", {"--alpha_sq", "--F", "--p_w", "--eta", "--exact_equality"}},
};

const std::map<Command, std::set<std::string>> kCommandOptions{
    {Command::keyrate, {}},
    {Command::sweep, {"--start", "--stop", "--step", "--coupling"}},
    {Command::simulate, {"--n", "--p_M", "--seed", "--disclosed_fraction", "--partitions", "--records"}},
    {Command::verify, {"--batch_size", "--batch_seed", "--debug_halve_lambda"}},
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void require_probability(double x, const std::string& name) {
  require(x >= 0.0 && x <= 1.0, name + " must lie in [0, 1]");
}

bool given(const CLI::App& app, const std::string& name) { return app.get_option(name)->count() > 0; }

}  // namespace

void register_options(CLI::App& app, Config& cfg) {
  app.set_config("--config", "", "Key-value configuration file; command-line flags override its entries");

  app.add_option("--scenario", cfg.scenario, "semi-honest | symmetric-adversarial | random-attack | custom")
      ->check(CLI::IsMember(kScenarios));

  app.add_option("--p", cfg.p, "semi-honest: forward depolarizing parameter");
  app.add_option("--q", cfg.q, "semi-honest: reverse depolarizing parameter");

  app.add_option("--Q", cfg.Q, "symmetric-adversarial: mismatch probability |a01|^2 + |a10|^2");
  app.add_option("--p_w", cfg.p_w, "symmetric-adversarial, custom: P(-1 | both reflect)");
  app.add_option("--f_rule", cfg.f_rule, "symmetric-adversarial: acceptance | depolarization | explicit")
      ->check(CLI::IsMember({"acceptance", "depolarization", "explicit"}));
  app.add_option("--p_tilde_a", cfg.p_tilde_a, "acceptance rule: target acceptance probability");
  app.add_option("--F_eq", cfg.F_eq, "explicit rule: F00 = F11");
  app.add_option("--F_neq", cfg.F_neq, "explicit rule: F01 = F10");

  app.add_option("--d_C", cfg.d_C, "random-attack: ancilla dimension");
  app.add_option("--attack_seed", cfg.attack_seed, "random-attack: seed of the random unitary");
  app.add_option("--fwd", cfg.fwd, "random-attack: forward depolarizing parameter");
  app.add_option("--rev", cfg.rev, "random-attack: reverse depolarizing parameter");
  app.add_option("--init", cfg.init, "random-attack: initial state, phi-plus | random")
      ->check(CLI::IsMember({"phi-plus", "random"}));
  app.add_option("--init_seed", cfg.init_seed, "random-attack: seed of the random initial state");

  app.add_option("--alpha_sq", cfg.alpha_sq, "custom: |a00|^2 |a01|^2 |a10|^2 |a11|^2");
  app.add_option("--F", cfg.F, "custom: F00 F01 F10 F11");
  app.add_option("--eta", cfg.eta, "custom: upper bound on <h0|h0>");
  app.add_flag("--exact_equality", cfg.exact_equality, "custom: eta equals <h0|h0> exactly");

  app.add_option("--start", cfg.start, "sweep: first Q");
  app.add_option("--stop", cfg.stop, "sweep: last Q (inclusive)");
  app.add_option("--step", cfg.step, "sweep: grid step");
  app.add_option("--coupling", cfg.coupling, "sweep: p=q=2Q (semi-honest) | p_w=Q (symmetric-adversarial)")
      ->check(CLI::IsMember({"p=q=2Q", "p_w=Q"}));

  app.add_option("--n", cfg.n, "simulate: number of iterations");
  app.add_option("--p_M", cfg.p_M, "simulate: probability that a user measures and resends");
  app.add_option("--seed", cfg.seed, "simulate: RNG seed");
  app.add_option("--disclosed_fraction", cfg.disclosed_fraction, "simulate: fraction of iterations disclosed");
  app.add_option("--partitions", cfg.partitions, "simulate: worker threads (0 = all cores); output is unaffected");

  app.add_option("--batch_size", cfg.batch_size, "verify: number of random attacks");
  app.add_option("--batch_seed", cfg.batch_seed, "verify: seed of the first random attack");
  app.add_flag("--debug_halve_lambda", cfg.debug_halve_lambda, "verify: negative control, replaces lambda~ by lambda~/2");

  app.add_option("--out", cfg.out, "CSV output path");
  app.add_option("--summary", cfg.summary, "JSON run summary path");
  app.add_option("--records", cfg.records, "simulate: per-iteration CSV export path");
}

void validate(const CLI::App& app, const Config& cfg, Command cmd) {
  for (const auto& [command, names] : kCommandOptions) {
    if (command == cmd) continue;
    for (const auto& name : names) require(!given(app, name), "option " + name + " does not apply to this command");
  }

  if (cmd == Command::verify) {
    require(cfg.batch_size > 0, "batch_size must be at least 1");
    require(cfg.scenario.empty(), "verify runs its own batch; --scenario does not apply");
    return;
  }

  require(!cfg.scenario.empty(), "--scenario is required");
  const auto& own = kScenarioOptions.at(cfg.scenario);
  for (const auto& [scenario, names] : kScenarioOptions) {
    if (scenario == cfg.scenario) continue;
    for (const auto& name : names) {
      if (own.count(name) == 0) require(!given(app, name), "option " + name + " does not apply to scenario " + cfg.scenario);
    }
  }

  if (cfg.scenario == "semi-honest") {
    require_probability(cfg.p, "p");
    require_probability(cfg.q, "q");
  } else if (cfg.scenario == "symmetric-adversarial") {
    require(cfg.Q >= 0.0 && cfg.Q < 1.0, "Q must lie in [0, 1)");
    require_probability(cfg.p_w, "p_w");
    require_probability(cfg.p_tilde_a, "p_tilde_a");
    require_probability(cfg.F_eq, "F_eq");
    require_probability(cfg.F_neq, "F_neq");
    if (cfg.f_rule != "acceptance") require(!given(app, "--p_tilde_a"), "--p_tilde_a needs f_rule = acceptance");
    if (cfg.f_rule != "explicit") {
      require(!given(app, "--F_eq") && !given(app, "--F_neq"), "--F_eq and --F_neq need f_rule = explicit");
    }
  } else if (cfg.scenario == "random-attack") {
    require(cfg.d_C >= 1, "d_C must be at least 1");
    require_probability(cfg.fwd, "fwd");
    require_probability(cfg.rev, "rev");
    if (cfg.init != "random") require(!given(app, "--init_seed"), "--init_seed needs init = random");
  } else if (cfg.scenario == "custom") {
    require(given(app, "--alpha_sq") && given(app, "--F"), "custom scenario needs --alpha_sq and --F");
    double sum = 0.0;
    for (double a : cfg.alpha_sq) {
      require_probability(a, "alpha_sq entry");
      sum += a;
    }
    require(std::abs(sum - 1.0) <= 1e-10, "alpha_sq entries must sum to 1");
    for (double f : cfg.F) require_probability(f, "F entry");
    require_probability(cfg.p_w, "p_w");
    require_probability(cfg.eta, "eta");
  }

  if (cmd == Command::sweep) {
    require(cfg.scenario == "semi-honest" || cfg.scenario == "symmetric-adversarial",
            "sweep needs a semi-honest or symmetric-adversarial scenario");
    const std::string coupling = effective_coupling(cfg);
    require(coupling == (cfg.scenario == "semi-honest" ? "p=q=2Q" : "p_w=Q"),
            "coupling " + coupling + " does not match scenario " + cfg.scenario);
    require(cfg.step > 0.0, "step must be positive");
    require(cfg.start >= 0.0 && cfg.stop < 1.0 && cfg.start <= cfg.stop, "need 0 <= start <= stop < 1");
    if (cfg.scenario == "semi-honest") {
      require(cfg.stop <= 0.5, "p = q = 2Q needs stop <= 0.5");
      require(!given(app, "--p") && !given(app, "--q"), "--p and --q are set by the coupling p=q=2Q");
    } else {
      require(!given(app, "--Q") && !given(app, "--p_w"), "--Q and --p_w are set by the coupling p_w=Q");
    }
  }

  if (cmd == Command::simulate) {
    require(has_physical_setup(cfg), "simulate needs a semi-honest or random-attack scenario");
    require(cfg.n >= 1, "n must be at least 1");
    require(cfg.p_M > 0.0 && cfg.p_M <= 1.0, "p_M must lie in (0, 1]");
    require(cfg.disclosed_fraction > 0.0 && cfg.disclosed_fraction <= 1.0, "disclosed_fraction must lie in (0, 1]");
  }
}

std::string effective_coupling(const Config& cfg) {
  if (!cfg.coupling.empty()) return cfg.coupling;
  return cfg.scenario == "semi-honest" ? "p=q=2Q" : "p_w=Q";
}

KeyRateInputs scenario_inputs(const Config& cfg) {
  if (cfg.scenario == "semi-honest") return scenario_semi_honest(cfg.p, cfg.q);
  if (cfg.scenario == "symmetric-adversarial") {
    if (cfg.f_rule == "acceptance") {
      return scenario_symmetric_adversarial(cfg.Q, cfg.p_w, (cfg.p_tilde_a - cfg.Q * cfg.Q) / (1.0 - cfg.Q), cfg.Q);
    }
    if (cfg.f_rule == "depolarization") {
      return scenario_symmetric_adversarial(cfg.Q, cfg.p_w, (1.0 - cfg.Q) / 2.0, cfg.Q / 2.0);
    }
    return scenario_symmetric_adversarial(cfg.Q, cfg.p_w, cfg.F_eq, cfg.F_neq);
  }
  if (cfg.scenario == "random-attack") {
    const ExactRun run = run_exact(physical_setup(cfg));
    return KeyRateInputs{run.stats, std::min(1.0, run.branch.h0_norm), EtaSource::measured_exact, true};
  }
  const auto& a = cfg.alpha_sq;
  const auto& f = cfg.F;
  return KeyRateInputs{derive_statistics({{{a[0], a[1]}, {a[2], a[3]}}}, {{{f[0], f[1]}, {f[2], f[3]}}}, cfg.p_w),
                       cfg.eta, EtaSource::scenario_derived, cfg.exact_equality};
}

bool has_physical_setup(const Config& cfg) { return cfg.scenario == "semi-honest" || cfg.scenario == "random-attack"; }

ProtocolSetup physical_setup(const Config& cfg) {
  if (cfg.scenario == "semi-honest") {
    return {InitialState::bell_phi_plus(), NoiseChannel::depolarizing(cfg.p), semi_honest_attack(),
            NoiseChannel::depolarizing(cfg.q)};
  }
  if (cfg.scenario == "random-attack") {
    std::optional<NoiseChannel> reverse;
    if (cfg.rev > 0.0) reverse = NoiseChannel::depolarizing(cfg.rev);
    return {cfg.init == "random" ? InitialState::random(cfg.init_seed) : InitialState::bell_phi_plus(),
            NoiseChannel::depolarizing(cfg.fwd), random_attack(cfg.d_C, cfg.attack_seed), reverse};
  }
  throw UsageError("scenario " + cfg.scenario + " has no physical realization");
}

ScenarioFamily sweep_family(const Config& cfg) {
  if (cfg.scenario == "semi-honest") return semi_honest_family();
  if (cfg.f_rule == "acceptance") return adversarial_acceptance_family(cfg.p_tilde_a);
  if (cfg.f_rule == "depolarization") return adversarial_depolarization_family();
  const double f_eq = cfg.F_eq, f_neq = cfg.F_neq;
  return [f_eq, f_neq](double Q) { return scenario_symmetric_adversarial(Q, Q, f_eq, f_neq); };
}

std::vector<double> sweep_grid(const Config& cfg) {
  const auto count = static_cast<std::size_t>(std::floor((cfg.stop - cfg.start) / cfg.step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = cfg.start + static_cast<double>(k) * cfg.step;
  return grid;
}

}  // namespace msqkd::cli
