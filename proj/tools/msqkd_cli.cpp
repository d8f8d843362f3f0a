// msqkd: command-line front end to the key-rate library for the mediated
// semi-quantum key distribution protocol.

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cli_config.hpp"
#include "msqkd/errors.hpp"
#include "msqkd/montecarlo.hpp"
#include "msqkd/oracle.hpp"
#include "msqkd/report_io.hpp"

namespace {

using nlohmann::ordered_json;
using namespace msqkd;
using namespace msqkd::cli;

// JSON numbers carry the same 12 significant digits as the CSV files.
ordered_json num(double x) { return std::stod(format_number(x)); }

ordered_json grid_json(const PairGrid& g) {
  return ordered_json::array({ordered_json::array({num(g[0][0]), num(g[0][1])}),
                              ordered_json::array({num(g[1][0]), num(g[1][1])})});
}

ordered_json stats_json(const ObservedStatistics& s) {
  ordered_json j;
  j["alpha_sq"] = grid_json(s.alpha_sq);
  j["F"] = grid_json(s.F);
  j["p_w"] = num(s.p_w);
  j["p_a"] = num(s.p_a);
  j["p_joint"] = grid_json(s.p_joint);
  j["Q"] = num(s.Q);
  return j;
}

ordered_json report_json(const KeyRateReport& r) {
  ordered_json j;
  j["Q"] = num(r.Q);
  j["p_a"] = num(r.p_a);
  j["p_C"] = num(r.p_C);
  j["p_W"] = num(r.p_W);
  j["Delta"] = num(r.Delta);
  j["q0"] = num(r.q0);
  j["F_lower"] = num(r.F_lower);
  j["lambda_tilde"] = num(r.lambda_tilde);
  j["term_hp0"] = num(r.term_hp0);
  j["term_HpCpW"] = num(r.term_HpCpW);
  j["term_pW"] = num(r.term_pW);
  j["term_pChlam"] = num(r.term_pChlam);
  j["rate"] = num(r.rate);
  j["rate_per_qubit"] = num(r.rate_per_qubit);
  j["used_fallback"] = r.used_fallback;
  return j;
}

ordered_json inputs_json(const KeyRateInputs& in) {
  ordered_json j = stats_json(in.stats);
  j["eta"] = num(in.eta);
  j["eta_source"] = in.source == EtaSource::measured_exact ? "measured_exact" : "scenario_derived";
  j["exact_equality"] = in.exact_equality;
  return j;
}

ordered_json scenario_json(const Config& cfg) {
  ordered_json j;
  j["name"] = cfg.scenario;
  if (cfg.scenario == "semi-honest") {
    j["p"] = num(cfg.p);
    j["q"] = num(cfg.q);
  } else if (cfg.scenario == "symmetric-adversarial") {
    j["Q"] = num(cfg.Q);
    j["p_w"] = num(cfg.p_w);
    j["f_rule"] = cfg.f_rule;
    if (cfg.f_rule == "acceptance") j["p_tilde_a"] = num(cfg.p_tilde_a);
    if (cfg.f_rule == "explicit") {
      j["F_eq"] = num(cfg.F_eq);
      j["F_neq"] = num(cfg.F_neq);
    }
  } else if (cfg.scenario == "random-attack") {
    j["d_C"] = cfg.d_C;
    j["attack_seed"] = cfg.attack_seed;
    j["fwd"] = num(cfg.fwd);
    j["rev"] = num(cfg.rev);
    j["init"] = cfg.init;
    if (cfg.init == "random") j["init_seed"] = cfg.init_seed;
  } else if (cfg.scenario == "custom") {
    j["alpha_sq"] = ordered_json::array();
    j["F"] = ordered_json::array();
    for (double a : cfg.alpha_sq) j["alpha_sq"].push_back(num(a));
    for (double f : cfg.F) j["F"].push_back(num(f));
    j["p_w"] = num(cfg.p_w);
    j["eta"] = num(cfg.eta);
    j["exact_equality"] = cfg.exact_equality;
  }
  return j;
}

// Q of the configured point, known even when the bound aborts.
double scenario_Q(const Config& cfg) {
  if (cfg.scenario == "semi-honest") return cfg.p / 2.0;
  if (cfg.scenario == "symmetric-adversarial") return cfg.Q;
  if (cfg.scenario == "custom") return cfg.alpha_sq[1] + cfg.alpha_sq[2];
  const Matrix transit = physical_setup(cfg).transit_state().matrix();
  return transit(1, 1).real() + transit(2, 2).real();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

void write_summary(const Config& cfg, const ordered_json& j) {
  if (!cfg.summary.empty()) write_file(cfg.summary, j.dump(2) + "\n");
}

// Writes CSV text to --out, or to stdout when no path is given.
void emit_csv(const Config& cfg, const std::string& csv) {
  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    write_file(cfg.out, csv);
  }
}

int cmd_keyrate(const Config& cfg) {
  ordered_json j;
  j["command"] = "keyrate";
  j["scenario"] = scenario_json(cfg);
  SweepPoint pt;
  pt.Q = scenario_Q(cfg);
  std::optional<double> rate_exact;
  try {
    const KeyRateInputs in = scenario_inputs(cfg);
    j["inputs"] = inputs_json(in);
    pt.report = key_rate_bound(in);
    if (cfg.scenario == "random-attack") {
      const ExactRun run = run_exact(physical_setup(cfg));
      rate_exact = exact_key_rate(run.rho_abcx, run.stats.joint_table()).rate_exact;
    }
  } catch (const AbortCondition& e) {
    pt.abort_reason = e.what();
  }

  std::ostringstream csv;
  write_sweep_csv(csv, std::span<const SweepPoint>(&pt, 1));
  if (!cfg.out.empty()) write_file(cfg.out, csv.str());

  std::string status;
  if (!pt.report) {
    status = "abort";
    j["abort_reason"] = pt.abort_reason;
  } else {
    status = pt.report->rate > 0.0 ? "ok" : "nonpositive";
    j["report"] = report_json(*pt.report);
    if (rate_exact) j["rate_exact"] = num(*rate_exact);
  }
  j["status"] = status;
  write_summary(cfg, j);

  std::cout << "keyrate scenario=" << cfg.scenario << " Q=" << format_number(pt.Q);
  if (pt.report) std::cout << " rate=" << format_number(pt.report->rate);
  if (rate_exact) std::cout << " rate_exact=" << format_number(*rate_exact);
  std::cout << " status=" << status << '\n';
  if (!pt.report) std::cerr << "abort: " << pt.abort_reason << '\n';
  return status == "ok" ? kExitOk : kExitAbort;
}

int cmd_sweep(const Config& cfg) {
  const auto family = sweep_family(cfg);
  const auto grid = sweep_grid(cfg);
  std::vector<SweepPoint> series;
  try {
    series = sweep(family, grid);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("sweep grid leaves the valid parameter range: ") + e.what());
  }
  std::ostringstream csv;
  write_sweep_csv(csv, series);
  emit_csv(cfg, csv.str());

  ordered_json j;
  j["command"] = "sweep";
  ordered_json sc = scenario_json(cfg);
  sc.erase("Q");
  sc.erase("p_w");
  sc.erase("p");
  sc.erase("q");
  j["scenario"] = sc;
  j["coupling"] = effective_coupling(cfg);
  j["grid"] = {{"start", num(cfg.start)}, {"stop", num(cfg.stop)}, {"step", num(cfg.step)}, {"points", grid.size()}};
  ordered_json crossings = ordered_json::array();
  std::size_t aborts = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (!series[k].report) ++aborts;
    if (k == 0) continue;
    const auto& a = series[k - 1];
    const auto& b = series[k];
    const bool pos_a = a.report && a.report->rate > 0.0;
    const bool pos_b = b.report && b.report->rate > 0.0;
    if (pos_a != pos_b) crossings.push_back(ordered_json::array({num(a.Q), num(b.Q)}));
  }
  j["aborts"] = aborts;
  j["crossings"] = crossings;
  ordered_json threshold = nullptr;
  if (family_rate(family, cfg.start) > 0.0 && !(family_rate(family, cfg.stop) > 0.0)) {
    threshold = num(noise_threshold(family, cfg.start, cfg.stop, 1e-9));
  }
  j["threshold"] = threshold;
  write_summary(cfg, j);

  if (!cfg.out.empty()) {
    std::cout << "sweep coupling=" << effective_coupling(cfg) << " points=" << grid.size() << " aborts=" << aborts;
    std::cout << " threshold=" << (threshold.is_null() ? std::string("none") : format_number(threshold.get<double>()))
              << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Config& cfg) {
  const ProtocolSetup setup = physical_setup(cfg);
  const SimulationResult res = simulate_iterations(cfg.n, cfg.p_M, setup, cfg.seed, cfg.partitions);
  if (!cfg.records.empty()) {
    std::ostringstream rec;
    write_records_csv(rec, res.records);
    write_file(cfg.records, rec.str());
  }
  const StatisticsEstimate est = estimate_statistics(res.records, cfg.disclosed_fraction, cfg.seed);

  ordered_json j;
  j["command"] = "simulate";
  j["scenario"] = scenario_json(cfg);
  j["montecarlo"] = {{"n", cfg.n},
                     {"p_M", num(cfg.p_M)},
                     {"seed", cfg.seed},
                     {"disclosed_fraction", num(cfg.disclosed_fraction)},
                     {"confidence", num(1.0 - 1e-6)}};
  const double fraction = static_cast<double>(res.accepted) / static_cast<double>(cfg.n);
  j["accepted"] = res.accepted;
  j["acceptance_fraction"] = num(fraction);
  j["keys_identical"] = res.key_a == res.key_b;
  j["disclosed"] = {{"total", est.disclosed},
                    {"both_measure", est.both_measure},
                    {"both_reflect", est.both_reflect},
                    {"accepted", est.accepted}};
  j["estimate"] = stats_json(est.point);
  j["half_width"] = stats_json(est.half_width);

  std::cout << "simulate scenario=" << cfg.scenario << " n=" << cfg.n << " accepted=" << res.accepted
            << " acceptance_fraction=" << format_number(fraction);

  if (!est.estimable()) {
    ordered_json flags = ordered_json::array();
    if (est.alpha_unestimable) flags.push_back("alpha_sq");
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t jj = 0; jj < 2; ++jj) {
        if (est.F_unestimable[i][jj]) flags.push_back("F" + std::to_string(i) + std::to_string(jj));
      }
    }
    if (est.p_w_unestimable) flags.push_back("p_w");
    if (est.joint_unestimable) flags.push_back("p_joint");
    j["unestimable"] = flags;
    j["status"] = "unestimable";
    write_summary(cfg, j);
    std::cout << " status=unestimable\n";
    std::cerr << "unestimable parameters:";
    for (const auto& f : flags) std::cerr << ' ' << f.get<std::string>();
    std::cerr << '\n';
    return kExitAbort;
  }

  // Semi-honest: eta from the observed reverse-noise level. Random attack:
  // <h0|h0> is not observable, so the exact value is used.
  const ExactRun exact = run_exact(setup);
  const double eta = cfg.scenario == "semi-honest" ? semi_honest_eta_estimate(est.point)
                                                   : std::min(1.0, exact.branch.h0_norm);
  const EtaSource source = cfg.scenario == "semi-honest" ? EtaSource::scenario_derived : EtaSource::measured_exact;
  SweepPoint pt;
  pt.Q = est.point.Q;
  try {
    pt.report = key_rate_bound(KeyRateInputs{est.point, eta, source, true});
  } catch (const AbortCondition& e) {
    pt.abort_reason = e.what();
  }
  std::optional<KeyRateReport> reference;
  try {
    reference = key_rate_bound(KeyRateInputs{exact.stats, std::min(1.0, exact.branch.h0_norm), EtaSource::measured_exact, true});
  } catch (const AbortCondition&) {
  }
  j["eta"] = num(eta);
  if (pt.report) j["report"] = report_json(*pt.report);
  if (reference) j["rate_exact_statistics"] = num(reference->rate);

  if (!cfg.out.empty()) {
    std::ostringstream csv;
    write_sweep_csv(csv, std::span<const SweepPoint>(&pt, 1));
    write_file(cfg.out, csv.str());
  }
  std::string status = !pt.report ? "abort" : (pt.report->rate > 0.0 ? "ok" : "nonpositive");
  if (!pt.report) j["abort_reason"] = pt.abort_reason;
  j["status"] = status;
  write_summary(cfg, j);

  if (pt.report) std::cout << " rate=" << format_number(pt.report->rate);
  if (reference) std::cout << " rate_exact_statistics=" << format_number(reference->rate);
  std::cout << " status=" << status << '\n';
  return status == "ok" ? kExitOk : kExitAbort;
}

int cmd_verify(const Config& cfg) {
  const auto batch = default_certification_batch(cfg.batch_size, cfg.batch_seed);
  BoundOptions options;
  if (cfg.debug_halve_lambda) options.lambda_scale = 0.5;
  const CertificationReport rep = certify_dominance(batch, options);

  std::ostringstream csv;
  write_certification_csv(csv, rep);
  if (!cfg.out.empty()) write_file(cfg.out, csv.str());

  std::size_t failed_checks = 0;
  for (const auto& r : rep.records) {
    if (!r.skipped && !r.checks_passed) ++failed_checks;
  }
  ordered_json j;
  j["command"] = "verify";
  j["batch_size"] = cfg.batch_size;
  j["batch_seed"] = cfg.batch_seed;
  j["debug_halve_lambda"] = cfg.debug_halve_lambda;
  j["instances"] = rep.records.size();
  j["violations"] = rep.violations;
  j["failed_decomposition_checks"] = failed_checks;
  j["skipped"] = rep.skipped;
  j["worst_slack"] = num(rep.worst_slack);
  j["tolerance"] = num(kDominanceTol);
  j["status"] = rep.pass() ? "pass" : "fail";
  write_summary(cfg, j);

  std::cout << "verify instances=" << rep.records.size() << " violations=" << rep.violations
            << " skipped=" << rep.skipped << " worst_slack=" << format_number(rep.worst_slack)
            << " status=" << (rep.pass() ? "pass" : "fail") << '\n';
  if (!rep.pass()) {
    std::cerr << "CERTIFICATION FAILED: " << rep.violations << " instance(s) where the bound exceeds the exact rate"
              << " or an entropy identity does not hold\n";
    for (const auto& r : rep.records) {
      if (!r.skipped && (r.slack < -kDominanceTol || !r.checks_passed)) {
        std::cerr << "  " << r.id << " slack=" << format_number(r.slack) << " checks=" << (r.checks_passed ? "ok" : "FAILED")
                  << '\n';
      }
    }
    return kExitCertification;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key-rate bound evaluation and certification for mediated semi-quantum key distribution"};
  app.fallthrough();
  app.require_subcommand(1);
  Config cfg;
  register_options(app, cfg);
  auto* keyrate = app.add_subcommand("keyrate", "Evaluate the key-rate bound for one scenario point");
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate the bound along a Q grid and write a CSV series");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run with parameter estimation from disclosed iterations");
  auto* verify = app.add_subcommand("verify", "Certify the bound against the exact conditional entropy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Command cmd = Command::keyrate;
  if (*sweep_cmd) cmd = Command::sweep;
  if (*simulate) cmd = Command::simulate;
  if (*verify) cmd = Command::verify;
  (void)keyrate;

  try {
    validate(app, cfg, cmd);
    switch (cmd) {
      case Command::keyrate: return cmd_keyrate(cfg);
      case Command::sweep: return cmd_sweep(cfg);
      case Command::simulate: return cmd_simulate(cfg);
      case Command::verify: return cmd_verify(cfg);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const AbortCondition& e) {
    std::cerr << "abort: " << e.what() << '\n';
    return kExitAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
