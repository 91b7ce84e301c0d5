#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbc/control.hpp"
#include "pbc/maps.hpp"
#include "pbc/noise.hpp"
#include "pbc/simulate.hpp"

namespace pbc {

// Inclusive lo:hi:step grid used by the scan subcommand.
struct GridSpec {
  double lo;
  double hi;
  double step;
  std::vector<double> expand() const;
};

// Flat key=value experiment description. Unknown keys and unparsable numbers
// are configuration errors; all numeric parsing is locale independent.
struct ExperimentConfig {
  // map
  std::string map = "ricker";
  double r = 5.0;
  double A = 2.0, B = 1.0, gamma_exp = 2.0;
  std::vector<double> poly;
  std::optional<RationalTail> tail;

  // scheme
  std::string scheme = "mult";
  double alpha = 0.8;
  std::optional<GridSpec> alpha_grid;  // scan only
  double l = 0.02;
  std::optional<GridSpec> l_grid;      // scan only
  std::string alpha_seq = "const";     // "const" or "iid:<lo>:<hi>"

  // noise
  std::string noise = "uniform";
  double nu = 1.0;
  uint64_t seed = NoiseSpec::kDefaultSeed;

  // run
  std::vector<double> x0{0.3};
  int64_t n_steps = 500;
  int64_t n_traj = 10;
  double eps = 1e-3;
  std::optional<double> eps1;  // additive target band width

  // lipschitz estimation
  std::optional<double> lip_eps;    // default 0.06 * K
  int64_t lip_grid = 200000;
  std::optional<double> lip_bound;  // default model domain bound
  std::optional<double> M_override, M_eps_override;

  // outputs
  std::string out_traj, out_stats, out_scan;
  int64_t dump_max = 10;
  bool audit = true;

  // Canonical `key=value` lines of the fully resolved config; prefixing each
  // with "# " yields the header every output starts with, and stripping that
  // prefix re-parses to the identical run.
  std::vector<std::string> resolved_lines() const;
};

// Parse key=value text (one pair per line, '#' comments, blank lines
// ignored), then apply override tokens of the same form on top.
ExperimentConfig parse_config(const std::string& file_text,
                              const std::vector<std::string>& overrides,
                              bool allow_grids = false);

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides,
                             bool allow_grids = false);

// Materialized experiment: every object the simulator needs, built once.
struct ResolvedExperiment {
  MapModel model;
  ControlScheme scheme;
  NoiseSpec noise;
  EnsembleSpec ensemble;
  EntryMarkers markers;
  LipschitzData lipschitz;       // certified (possibly overridden) constants
  std::optional<AuditParams> audit;
  double lip_eps;
};

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

// CSV writers. All files are UTF-8 with '.' decimals and '\n' newlines, and
// carry the resolved config as leading '# ' comment lines.
void write_trajectory_csv(const std::string& path, const std::vector<std::string>& header,
                          const std::vector<Trajectory>& trajectories);
void write_stats_csv(const std::string& path, const std::vector<std::string>& header,
                     const EnsembleStats& stats);
void write_scan_csv(const std::string& path, const std::vector<std::string>& header,
                    const ScanTable& table);

std::string render_stats_csv(const std::vector<std::string>& header, const EnsembleStats& stats);

}  // namespace pbc
