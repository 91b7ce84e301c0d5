#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "pbc/simulate.hpp"

using namespace pbc;

namespace {

struct Fig1 {
  MapModel model = MapModel::ricker(5.0);
  ControlScheme scheme = ControlScheme::multiplicative(0.8, 0.02);
  NoiseSpec noise = NoiseSpec::uniform();
  LipschitzData lip = certify_lipschitz(model, 0.06, 100000).inflated();
  EntryMarkers markers;
  AuditParams audit;

  explicit Fig1(double eps) {
    InvariantInterval iv = invariant_interval(model);
    markers = {1.0, eps, true, iv.mu1, iv.mu2};
    audit = make_audit_params(model, scheme, 1.0, lip);
  }
};

}  // namespace

TEST_CASE("a trajectory started at the fixed point stays there") {
  Fig1 f(1e-6);
  Trajectory t = run_trajectory(f.model, f.scheme, f.noise, 1.0, 200, 0, &f.markers);
  for (double v : t.values) REQUIRE(v == 1.0);
  CHECK(t.clamp_events == 0);
  CHECK(!t.extinct);
  CHECK(t.first_entry_eps.value() == 0);
  CHECK(audit_trajectory(t, f.model, f.scheme, f.noise, f.audit).empty());
}

TEST_CASE("uncontrolled iteration matches hand iteration") {
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme scheme = ControlScheme::uncontrolled();
  NoiseSpec noise = NoiseSpec::uniform();
  Trajectory t = run_trajectory(ricker, scheme, noise, 0.3, 4, 0);
  double x = 0.3;
  for (int n = 0; n <= 4; ++n) {
    REQUIRE(t.values[n] == doctest::Approx(x).epsilon(1e-12));
    x = x * std::exp(5.0 * (1.0 - x));
  }
}

TEST_CASE("input validation") {
  Fig1 f(1e-6);
  CHECK_THROWS_AS(run_trajectory(f.model, f.scheme, f.noise, 0.0, 10, 0), ConfigError);
  CHECK_THROWS_AS(run_trajectory(f.model, f.scheme, f.noise, 0.3, 0, 0), ConfigError);
}

TEST_CASE("noisy control converges from a chaotic start") {
  Fig1 f(1e-4);
  EnsembleSpec spec;
  spec.x0 = {0.3};
  spec.n_steps = 500;
  spec.n_traj = 10;
  spec.eps = 1e-4;
  EnsembleResult res = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, &f.audit);
  CHECK(res.stats.convergence_fraction() == 1.0);
  CHECK(res.stats.n_entered_eps == 10);
  CHECK(res.stats.clamp_total == 0);
}

TEST_CASE("the invariant interval is entered no later than the target ball") {
  Fig1 f(1e-6);  // eps below min{K - mu1, mu2 - K}
  for (uint32_t i = 0; i < 50; ++i) {
    Trajectory t = run_trajectory(f.model, f.scheme, f.noise, 4.7, 600, i, &f.markers);
    REQUIRE(t.first_entry_mu.has_value());
    REQUIRE(t.first_entry_eps.has_value());
    REQUIRE(*t.first_entry_mu <= *t.first_entry_eps);
  }
}

TEST_CASE("auditors stay silent on a compliant configuration") {
  // 100 trajectories x 10^4 steps: one million audited transitions.
  Fig1 f(1e-6);
  EnsembleSpec spec;
  spec.x0 = {0.3};
  spec.n_steps = 10000;
  spec.n_traj = 100;
  spec.eps = 1e-6;
  EnsembleResult res = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, &f.audit);
  CHECK(res.stats.violations_a == 0);
  CHECK(res.stats.violations_b == 0);
  CHECK(res.stats.violations_c == 0);
  CHECK(res.stats.violations_d == 0);
}

TEST_CASE("auditor flags a corrupted value exactly once") {
  Fig1 f(1e-6);
  CHECK(f.audit.ball_active);
  Trajectory t = run_trajectory(f.model, f.scheme, f.noise, 0.3, 400, 7, &f.markers);
  REQUIRE(t.first_entry_eps.has_value());
  size_t m = static_cast<size_t>(*t.first_entry_eps) + 50;
  REQUIRE(m + 1 < t.values.size());
  t.values[m] += 0.5;  // bump one in-ball value outside the trap
  std::vector<Violation> v = audit_trajectory(t, f.model, f.scheme, f.noise, f.audit);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == 'c');
  CHECK(v[0].step == static_cast<int64_t>(m));
}

TEST_CASE("convergence fraction settles monotonically once everyone entered") {
  Fig1 f(1e-4);
  EnsembleSpec spec;
  spec.x0 = {0.3};
  spec.n_steps = 400;
  spec.n_traj = 200;
  spec.eps = 1e-4;
  EnsembleResult res = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, &f.audit);
  REQUIRE(res.stats.n_entered_eps == 200);
  for (size_t n = static_cast<size_t>(res.stats.max_entry_eps);
       n + 1 < res.stats.frac_eps.size(); ++n) {
    REQUIRE(res.stats.frac_eps[n + 1] >= res.stats.frac_eps[n]);
  }
  // A wider ball can only contain more trajectories at any step.
  spec.eps = 1e-3;
  EnsembleResult wide = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, nullptr);
  for (size_t n = 0; n < wide.stats.frac_eps.size(); ++n) {
    REQUIRE(wide.stats.frac_eps[n] >= res.stats.frac_eps[n]);
  }
}

TEST_CASE("plain control at alpha one half leaves the chaos untouched") {
  // No noise: every trajectory is the same orbit and it does not settle.
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme det = ControlScheme::deterministic(0.5);
  NoiseSpec noise = NoiseSpec::uniform();
  EntryMarkers markers{1.0, 1e-3, false, 0.0, 0.0};
  EnsembleSpec spec;
  spec.x0 = {0.3};
  spec.n_steps = 2000;
  spec.n_traj = 5;
  spec.eps = 1e-3;
  EnsembleResult res = run_ensemble(ricker, det, noise, spec, markers, nullptr);
  CHECK(res.stats.convergence_fraction() == 0.0);
}

TEST_CASE("ensemble aggregation is independent of the worker count") {
  Fig1 f(1e-6);
  EnsembleSpec spec;
  spec.x0 = {0.3};
  spec.n_steps = 300;
  spec.n_traj = 64;
  spec.eps = 1e-6;
  spec.dump_max = 5;
  spec.threads = 1;
  EnsembleResult a = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, &f.audit);
  spec.threads = 4;
  EnsembleResult b = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, &f.audit);
  REQUIRE(a.stats.q50.size() == b.stats.q50.size());
  CHECK(std::memcmp(a.stats.q50.data(), b.stats.q50.data(),
                    a.stats.q50.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.stats.q95.data(), b.stats.q95.data(),
                    a.stats.q95.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.stats.frac_eps.data(), b.stats.frac_eps.data(),
                    a.stats.frac_eps.size() * sizeof(double)) == 0);
  REQUIRE(a.dumped.size() == b.dumped.size());
  for (size_t i = 0; i < a.dumped.size(); ++i) {
    REQUIRE(a.dumped[i].values == b.dumped[i].values);
  }
}

TEST_CASE("multiple starting points cycle through the ensemble") {
  Fig1 f(1e-6);
  EnsembleSpec spec;
  spec.x0 = {0.3, 2.0, 5.0};
  spec.n_steps = 5;
  spec.n_traj = 6;
  spec.eps = 1e-6;
  spec.dump_max = 6;
  EnsembleResult res = run_ensemble(f.model, f.scheme, f.noise, spec, f.markers, nullptr);
  CHECK(res.dumped[0].values[0] == 0.3);
  CHECK(res.dumped[1].values[0] == 2.0);
  CHECK(res.dumped[2].values[0] == 5.0);
  CHECK(res.dumped[3].values[0] == 0.3);
}

TEST_CASE("a frozen control leaves the state at x0") {
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme frozen;  // alpha = 1 is unreachable through the factories
  frozen.kind = SchemeKind::deterministic_pbc;
  frozen.alpha = 1.0;
  NoiseSpec noise = NoiseSpec::uniform();
  Trajectory t = run_trajectory(ricker, frozen, noise, 0.3, 1000, 0);
  for (double v : t.values) REQUIRE(v == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("state at zero is absorbing and flagged") {
  MapModel logistic = MapModel::truncated_logistic(4.0);
  ControlScheme scheme = ControlScheme::uncontrolled();
  NoiseSpec noise = NoiseSpec::uniform();
  // x0 above the truncation point maps to zero immediately.
  Trajectory t = run_trajectory(logistic, scheme, noise, 1.3, 20, 0);
  CHECK(t.extinct);
  for (size_t n = 1; n < t.values.size(); ++n) REQUIRE(t.values[n] == 0.0);
}

TEST_CASE("non-finite states truncate the trajectory") {
  // Rational tail with a pole: starting on the pole blows up at once.
  MapModel m = MapModel::custom({0.0, 3.0, -1.0}, RationalTail{6.0, 1.0, -1.0, 6.5});
  ControlScheme scheme = ControlScheme::uncontrolled();
  NoiseSpec noise = NoiseSpec::uniform();
  Trajectory t = run_trajectory(m, scheme, noise, 6.5, 50, 0);
  CHECK(t.diverged);
  CHECK(t.values.size() < 51);

  EntryMarkers markers{m.equilibrium(), 1e-3, false, 0.0, 0.0};
  EnsembleSpec spec;
  spec.x0 = {6.5};
  spec.n_steps = 50;
  spec.n_traj = 3;
  spec.eps = 1e-3;
  EnsembleResult res = run_ensemble(m, scheme, noise, spec, markers, nullptr);
  CHECK(res.stats.diverged_count == 3);
  CHECK(res.stats.convergence_fraction() == 0.0);  // diverged counts as not converged
}

TEST_CASE("scan grid marks admissible cells and frozen cells") {
  MapModel ricker = MapModel::ricker(5.0);
  LipschitzData lip = certify_lipschitz(ricker, 0.06, 100000);
  NoiseSpec noise = NoiseSpec::uniform();
  ControlScheme tmpl = ControlScheme::multiplicative(0.5, 0.0);
  ScanTable table = parameter_scan(ricker, tmpl, noise, {0.5, 0.94, 1.0}, {0.0, 0.01}, 40, 1500,
                                   1e-3, lip);
  REQUIRE(table.cells.size() == 6);
  // alpha = 0.94 is inside the deterministic stability range.
  for (const ScanCell& cell : table.cells) {
    if (cell.alpha == 0.94) {
      CHECK(cell.admissible);
      CHECK(cell.frac == 1.0);
    }
    if (cell.alpha == 0.5) {
      CHECK(!cell.admissible);
      CHECK(cell.frac <= 0.05);  // chaotic regime: essentially no settling
    }
    if (cell.alpha == 1.0) {
      CHECK(cell.frac == 0.0);  // frozen at x0
      CHECK(!cell.admissible);
    }
  }
}
