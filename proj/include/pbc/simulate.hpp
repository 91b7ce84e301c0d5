#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pbc/analysis.hpp"
#include "pbc/control.hpp"
#include "pbc/maps.hpp"
#include "pbc/noise.hpp"

namespace pbc {

// Thresholds used to stamp first-entry indices on a trajectory.
struct EntryMarkers {
  double K = 0.0;
  double eps = 0.0;        // convergence ball |x - K| < eps
  bool mu_valid = false;   // [mu1, mu2] entry tracking enabled
  double mu1 = 0.0;
  double mu2 = 0.0;
};

struct Trajectory {
  double x0 = 0.0;
  uint32_t seed_index = 0;
  std::vector<double> values;  // x_0 .. x_n; shorter when the run diverged
  int64_t clamp_events = 0;
  bool extinct = false;   // state hit exactly zero at some step
  bool diverged = false;  // non-finite state; trajectory truncated
  std::optional<int64_t> first_entry_mu;
  std::optional<int64_t> first_entry_eps;
};

Trajectory run_trajectory(const MapModel& model, const ControlScheme& scheme,
                          const NoiseSpec& noise, double x0, int64_t n_steps, uint32_t index,
                          const EntryMarkers* markers = nullptr);

// Trajectory auditing. Each enabled invariant emits one violation record per
// offending step.
//   'a'  contraction: |x_{n+1}-K| grew although the realized control value
//        was inside (1 - 1/M, 1); multiplicative slack 1 + 1e-12
//   'b'  trapping: left [mu1, mu2] although the realized control value was
//        inside [0, 1]
//   'c'  local ball: left (K - eps_ball, K + eps_ball) after first entry
//        (enabled when the local trap criterion holds for the scheme)
//   'd'  additive band: left (K - blur - eps_audit, K + blur + eps_audit)
//        after first entry
struct AuditParams {
  double K = 0.0;
  double M = 0.0;
  bool mu_valid = false;
  double mu1 = 0.0;
  double mu2 = 0.0;
  bool ball_active = false;   // kind 'c'
  double eps_ball = 0.0;
  bool band_active = false;   // kind 'd'
  double band_radius = 0.0;   // blur + eps_audit
  static constexpr double kBandSlack = 0.01;         // eps_audit
  static constexpr double kMonotoneSlack = 1e-12;    // kind 'a' multiplicative slack
};

// Assemble auditor thresholds from the scheme and certified constants;
// activates only the invariants whose hypotheses hold.
AuditParams make_audit_params(const MapModel& model, const ControlScheme& scheme, double nu,
                              const LipschitzData& lip);

struct Violation {
  int64_t step;
  char kind;
  double magnitude;
};

std::vector<Violation> audit_trajectory(const Trajectory& traj, const MapModel& model,
                                        const ControlScheme& scheme, const NoiseSpec& noise,
                                        const AuditParams& params);

struct EnsembleSpec {
  std::vector<double> x0;
  int64_t n_steps = 500;
  int64_t n_traj = 10;
  double eps = 1e-3;
  int threads = 0;        // 0: hardware concurrency (capped by PBC_THREADS)
  int64_t dump_max = 0;   // how many trajectories to keep in full
  bool audit = true;
};

struct EnsembleStats {
  int64_t n_traj = 0;
  int64_t n_steps = 0;
  // Per-step aggregates over the ensemble, index 0..n_steps.
  std::vector<double> q05, q50, q95;  // quantiles of |x_n - K|
  std::vector<double> frac_eps;       // fraction with |x_n - K| < eps

  int64_t n_entered_mu = 0, n_entered_eps = 0;
  double mean_entry_mu = 0.0, mean_entry_eps = 0.0;
  int64_t max_entry_mu = 0, max_entry_eps = 0;

  int64_t clamp_total = 0;
  int64_t extinct_count = 0;
  int64_t diverged_count = 0;

  int64_t violations_a = 0, violations_b = 0, violations_c = 0, violations_d = 0;
  int64_t band_escape_count = 0;  // alias of violations_d

  double convergence_fraction() const { return frac_eps.empty() ? 0.0 : frac_eps.back(); }
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<Trajectory> dumped;
};

EnsembleResult run_ensemble(const MapModel& model, const ControlScheme& scheme,
                            const NoiseSpec& noise, const EnsembleSpec& spec,
                            const EntryMarkers& markers, const AuditParams* audit_params);

// Effective worker count: explicit request, else hardware concurrency, both
// capped by the PBC_THREADS environment variable.
int resolve_threads(int requested);

struct ScanCell {
  double alpha;
  double l;
  double frac;
  bool admissible;
};

struct ScanTable {
  std::vector<ScanCell> cells;  // row-major: alpha outer, l inner
};

// Empirical convergence fraction against the theoretical verdict on an
// (alpha, l) grid. The scheme template supplies the scheme kind; alpha and l
// are overridden per cell.
ScanTable parameter_scan(const MapModel& model, const ControlScheme& scheme_template,
                         const NoiseSpec& noise, const std::vector<double>& alpha_grid,
                         const std::vector<double>& l_grid, int64_t n_traj, int64_t n_steps,
                         double eps, const LipschitzData& lip, int threads = 0, double x0 = 0.3);

}  // namespace pbc
