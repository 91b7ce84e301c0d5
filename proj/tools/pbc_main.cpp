// pbc: config-driven harness for prediction-based control experiments.
//
// Subcommands:
//   check      evaluate the admissibility criteria for the configured point
//   simulate   run a trajectory ensemble, emit trajectory + stats CSVs
//   scan       sweep an (alpha, l) grid, emit the scan CSV
//   constants  print every derived constant as `name value` lines
//   estimate   print the Lipschitz-type constants with grid metadata
//
// Exit codes: 0 success, 1 check found a failed clause, 2 config error.

#include <cstring>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pbc/analysis.hpp"
#include "pbc/config.hpp"
#include "pbc/numeric.hpp"
#include "pbc/simulate.hpp"

namespace {

using namespace pbc;

void print_usage(std::ostream& os) {
  os << "usage: pbc <check|simulate|scan|constants|estimate> [config-file] [key=value ...]\n"
        "  config file: one key=value per line, '#' starts a comment\n"
        "  overrides:   key=value tokens on the command line win over the file\n"
        "  environment: PBC_THREADS caps worker parallelism\n";
}

struct Cli {
  std::string command;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
};

Cli parse_cli(int argc, char** argv) {
  if (argc < 2) throw ConfigError("missing subcommand");
  Cli cli;
  cli.command = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string tok = argv[i];
    if (tok.find('=') != std::string::npos) {
      cli.overrides.push_back(tok);
    } else if (!cli.config_path) {
      cli.config_path = tok;
    } else {
      throw ConfigError("more than one config file given: '" + tok + "'");
    }
  }
  return cli;
}

void print_header(const ExperimentConfig& cfg) {
  for (const std::string& line : cfg.resolved_lines()) std::cout << "# " << line << "\n";
}

void print_report(const AdmissibilityReport& report) {
  for (const CriterionReport& crit : report.criteria) {
    if (!crit.applicable) continue;
    for (const Clause& clause : crit.clauses) {
      std::cout << crit.key << '.' << clause.name << '\t' << (clause.pass ? "PASS" : "FAIL")
                << '\t' << format_double(clause.margin) << "\n";
    }
  }
  if (report.widest_interval && !report.widest_interval->empty()) {
    std::cout << "L_INTERVAL " << format_double(report.widest_interval->lo) << ' '
              << format_double(report.widest_interval->hi) << "\n";
  } else {
    std::cout << "L_INTERVAL EMPTY\n";
  }
}

int cmd_check(const ExperimentConfig& cfg) {
  ResolvedExperiment exp = resolve_experiment(cfg);
  print_header(cfg);
  LipschitzData lip = (cfg.M_override && cfg.M_eps_override) ? exp.lipschitz
                                                             : exp.lipschitz.inflated();
  AdmissibilityReport report;
  if (cfg.scheme == "add") {
    report = admissible_additive(cfg.alpha, cfg.l, exp.model, lip, cfg.eps1);
  } else {
    report = admissible_multiplicative(cfg.alpha, cfg.l, lip, cfg.nu);
  }
  print_report(report);
  return report.any_fail() ? 1 : 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  ResolvedExperiment exp = resolve_experiment(cfg);
  EnsembleSpec spec = exp.ensemble;
  EnsembleResult result = run_ensemble(exp.model, exp.scheme, exp.noise, spec, exp.markers,
                                       exp.audit ? &*exp.audit : nullptr);
  const EnsembleStats& st = result.stats;

  std::vector<std::string> header = cfg.resolved_lines();
  if (!cfg.out_traj.empty()) write_trajectory_csv(cfg.out_traj, header, result.dumped);
  if (!cfg.out_stats.empty()) write_stats_csv(cfg.out_stats, header, st);

  print_header(cfg);
  std::cout << "n_traj " << format_int(st.n_traj) << "\n";
  std::cout << "n_steps " << format_int(st.n_steps) << "\n";
  std::cout << "convergence_fraction " << format_double(st.convergence_fraction()) << "\n";
  std::cout << "entered_mu " << format_int(st.n_entered_mu) << "\n";
  std::cout << "entered_eps " << format_int(st.n_entered_eps) << "\n";
  std::cout << "mean_first_entry_mu " << format_double(st.mean_entry_mu) << "\n";
  std::cout << "mean_first_entry_eps " << format_double(st.mean_entry_eps) << "\n";
  std::cout << "max_first_entry_mu " << format_int(st.max_entry_mu) << "\n";
  std::cout << "max_first_entry_eps " << format_int(st.max_entry_eps) << "\n";
  std::cout << "clamp_events " << format_int(st.clamp_total) << "\n";
  std::cout << "extinct " << format_int(st.extinct_count) << "\n";
  std::cout << "diverged " << format_int(st.diverged_count) << "\n";
  std::cout << "violations_a " << format_int(st.violations_a) << "\n";
  std::cout << "violations_b " << format_int(st.violations_b) << "\n";
  std::cout << "violations_c " << format_int(st.violations_c) << "\n";
  std::cout << "violations_d " << format_int(st.violations_d) << "\n";
  return 0;
}

int cmd_scan(const ExperimentConfig& cfg) {
  ResolvedExperiment exp = resolve_experiment(cfg);
  std::vector<double> alphas =
      cfg.alpha_grid ? cfg.alpha_grid->expand() : std::vector<double>{cfg.alpha};
  std::vector<double> ls = cfg.l_grid ? cfg.l_grid->expand() : std::vector<double>{cfg.l};
  ScanTable table = parameter_scan(exp.model, exp.scheme, exp.noise, alphas, ls, cfg.n_traj,
                                   cfg.n_steps, cfg.eps, exp.lipschitz, 0, cfg.x0.front());
  std::vector<std::string> header = cfg.resolved_lines();
  if (!cfg.out_scan.empty()) write_scan_csv(cfg.out_scan, header, table);

  print_header(cfg);
  std::cout << "cells " << format_int(static_cast<int64_t>(table.cells.size())) << "\n";
  if (cfg.out_scan.empty()) {
    std::cout << "alpha,l,frac,admissible\n";
    for (const ScanCell& cell : table.cells) {
      std::cout << format_double(cell.alpha) << ',' << format_double(cell.l) << ','
                << format_double(cell.frac) << ',' << (cell.admissible ? '1' : '0') << "\n";
    }
  }
  return 0;
}

int cmd_constants(const ExperimentConfig& cfg) {
  ResolvedExperiment exp = resolve_experiment(cfg);
  print_header(cfg);
  auto put = [](const std::string& name, const std::string& value) {
    std::cout << name << ' ' << value << "\n";
  };

  put("K", format_double(exp.model.equilibrium()));
  if (exp.model.has_critical_point()) put("c", format_double(exp.model.critical_point()));
  put("M", format_double(exp.lipschitz.M));
  put("M_eps", format_double(exp.lipschitz.M_eps));
  put("lip_eps", format_double(exp.lip_eps));

  if (exp.model.has_critical_point()) {
    InvariantInterval iv = invariant_interval(exp.model);
    put("mu0", format_double(iv.mu0));
    put("mu1", format_double(iv.mu1));
    put("mu2", format_double(iv.mu2));
  }

  if (cfg.scheme == "add") {
    Rate rate = contraction_rate(cfg.alpha, cfg.l, cfg.nu, RateMode::additive);
    put("gamma", format_double(rate.gamma));
    if (rate.contracts) {
      put("blur", format_double(blur_radius(cfg.alpha, cfg.l)));
      if (cfg.eps1) {
        put("l_max_for_eps1",
            format_double(max_additive_noise(cfg.alpha, exp.model, *cfg.eps1)));
      }
    }
  } else {
    Rate rate = contraction_rate(cfg.alpha, cfg.l, cfg.nu, RateMode::multiplicative);
    put("gamma", format_double(rate.gamma));
  }

  if (exp.model.has_critical_point() && cfg.scheme != "uncontrolled" && cfg.scheme != "mapmult") {
    HittingConstants hc = hitting_constants(exp.model, exp.lipschitz, cfg.alpha, cfg.l, cfg.nu,
                                            exp.lip_eps, /*force=*/true);
    put("hypotheses_ok", hc.hypotheses_ok ? "1" : "0");
    put("d1", format_double(hc.d1));
    put("N1", format_int(hc.N1));
    put("N2", format_int(hc.N2));
    put("a1", format_double(hc.a1));
    put("delta", format_double(hc.delta));
    put("r", format_int(hc.r_escape));
  }
  return 0;
}

int cmd_estimate(const ExperimentConfig& cfg) {
  ResolvedExperiment exp = resolve_experiment(cfg);
  print_header(cfg);
  double bound = cfg.lip_bound.value_or(exp.model.domain_bound());
  LipschitzEstimate global = estimate_global_lipschitz(exp.model, bound, cfg.lip_grid);
  LipschitzEstimate local = estimate_local_lipschitz(exp.model, exp.lip_eps, cfg.lip_grid);
  std::cout << "M " << format_double(global.value) << " tol " << format_double(global.tolerance)
            << " grid " << format_int(global.grid) << " bound " << format_double(bound) << "\n";
  std::cout << "M_eps " << format_double(local.value) << " tol " << format_double(local.tolerance)
            << " grid " << format_int(local.grid) << " eps " << format_double(exp.lip_eps)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    Cli cli = parse_cli(argc, argv);
    const bool allow_grids = cli.command == "scan";
    ExperimentConfig cfg = load_config(cli.config_path, cli.overrides, allow_grids);
    if (cli.command == "check") return cmd_check(cfg);
    if (cli.command == "simulate") return cmd_simulate(cfg);
    if (cli.command == "scan") return cmd_scan(cfg);
    if (cli.command == "constants") return cmd_constants(cfg);
    if (cli.command == "estimate") return cmd_estimate(cfg);
    throw ConfigError("unknown subcommand '" + cli.command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_usage(std::cerr);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
