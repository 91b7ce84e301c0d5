#include "pbc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <thread>

namespace pbc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool bracket_scheme(SchemeKind k) {
  return k == SchemeKind::uncontrolled || k == SchemeKind::deterministic_pbc ||
         k == SchemeKind::multiplicative_pbc;
}

// Control value the scheme applies for a given draw; NaN when the recurrence
// has no control parameter. Must match step() exactly.
double realized_alpha(const ControlScheme& scheme, double xi) {
  switch (scheme.kind) {
    case SchemeKind::uncontrolled:
      return 0.0;
    case SchemeKind::deterministic_pbc:
      if (scheme.seq == AlphaSequence::iid_uniform) {
        return scheme.seq_lo + (scheme.seq_hi - scheme.seq_lo) * (0.5 * (xi + 1.0));
      }
      return scheme.alpha;
    case SchemeKind::multiplicative_pbc:
      return scheme.alpha + scheme.l * xi;
    case SchemeKind::additive_pbc:
      return scheme.alpha;
    case SchemeKind::map_multiplicative:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Quantile with linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  double h = p * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double w = h - static_cast<double>(lo);
  return v[lo] + w * (v[lo + 1] - v[lo]);
}

// Simple deterministic work pool: workers claim trajectory indices from an
// atomic counter and write into index-addressed slots.
template <typename Fn>
void parallel_for_index(int64_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      int64_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int count = static_cast<int>(std::min<int64_t>(threads, n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

int resolve_threads(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int threads = requested > 0 ? requested : hw;
  if (const char* env = std::getenv("PBC_THREADS")) {
    int cap = 0;
    auto res = std::from_chars(env, env + std::strlen(env), cap);
    if (res.ec == std::errc() && *res.ptr == '\0' && cap >= 1) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

Trajectory run_trajectory(const MapModel& model, const ControlScheme& scheme,
                          const NoiseSpec& noise, double x0, int64_t n_steps, uint32_t index,
                          const EntryMarkers* markers) {
  if (!(x0 > 0.0)) throw ConfigError("run_trajectory: x0 must be positive");
  if (n_steps < 1) throw ConfigError("run_trajectory: n_steps must be at least 1");

  Trajectory traj;
  traj.x0 = x0;
  traj.seed_index = index;
  traj.values.reserve(static_cast<size_t>(n_steps) + 1);
  traj.values.push_back(x0);

  SampleStream stream = derive_stream(noise, index);
  double x = x0;
  auto mark = [&](double v, int64_t step) {
    if (markers == nullptr) return;
    if (markers->mu_valid && !traj.first_entry_mu && v >= markers->mu1 && v <= markers->mu2) {
      traj.first_entry_mu = step;
    }
    if (!traj.first_entry_eps && std::abs(v - markers->K) < markers->eps) {
      traj.first_entry_eps = step;
    }
  };
  mark(x, 0);

  for (int64_t n = 0; n < n_steps; ++n) {
    StepResult s = step(model, scheme, x, stream.at(static_cast<uint64_t>(n)));
    if (!std::isfinite(s.x)) {
      traj.diverged = true;
      break;
    }
    x = s.x;
    traj.values.push_back(x);
    if (s.clamped) ++traj.clamp_events;
    if (x == 0.0) traj.extinct = true;
    mark(x, n + 1);
  }
  return traj;
}

AuditParams make_audit_params(const MapModel& model, const ControlScheme& scheme, double nu,
                              const LipschitzData& lip) {
  AuditParams p;
  p.K = model.equilibrium();
  p.M = lip.M;

  if (model.has_critical_point()) {
    InvariantInterval iv = invariant_interval(model);
    p.mu_valid = true;
    p.mu1 = iv.mu1;
    p.mu2 = iv.mu2;
  }

  // Local-ball trap: needs every realized control value above the local
  // threshold and below one.
  const double me = 1.0 - 1.0 / lip.M_eps;
  double alo = 0.0, ahi = 1.0;
  bool has_alpha = true;
  switch (scheme.kind) {
    case SchemeKind::deterministic_pbc:
      if (scheme.seq == AlphaSequence::iid_uniform) {
        alo = scheme.seq_lo;
        ahi = scheme.seq_hi;
      } else {
        alo = ahi = scheme.alpha;
      }
      break;
    case SchemeKind::multiplicative_pbc:
      alo = scheme.alpha - scheme.l;
      ahi = scheme.alpha + scheme.l * nu;
      break;
    default:
      has_alpha = false;
      break;
  }
  if (has_alpha && alo > me && ahi < 1.0) {
    p.ball_active = true;
    p.eps_ball = lip.eps;
  }

  if (scheme.kind == SchemeKind::additive_pbc && model.has_critical_point()) {
    double gamma = std::max(scheme.alpha, 1.0 - scheme.alpha);
    double K = model.equilibrium();
    double c = model.critical_point();
    bool admissible = scheme.alpha > 1.0 - 1.0 / lip.M && scheme.alpha < 1.0 &&
                      scheme.l < (1.0 - gamma) * (K - c) && gamma < 1.0;
    if (admissible) {
      double radius = scheme.l / (1.0 - gamma) + AuditParams::kBandSlack;
      // The band argument runs inside the contraction region [c, 2K - c].
      if (radius < K - c) {
        p.band_active = true;
        p.band_radius = radius;
      }
    }
  }
  return p;
}

std::vector<Violation> audit_trajectory(const Trajectory& traj, const MapModel& model,
                                        const ControlScheme& scheme, const NoiseSpec& noise,
                                        const AuditParams& params) {
  (void)model;
  std::vector<Violation> out;
  if (traj.values.size() < 2) return out;

  SampleStream stream = derive_stream(noise, traj.seed_index);
  const bool bracket = bracket_scheme(scheme.kind);
  const double contraction_lo = 1.0 - 1.0 / params.M;

  bool in_ball = false;
  bool in_band = false;
  const double K = params.K;

  for (size_t n = 0; n + 1 < traj.values.size(); ++n) {
    double x = traj.values[n];
    double x1 = traj.values[n + 1];
    double xi = stream.at(static_cast<uint64_t>(n));
    double an = realized_alpha(scheme, xi);
    int64_t step_idx = static_cast<int64_t>(n) + 1;

    if (bracket && an > contraction_lo && an < 1.0) {
      double dev = std::abs(x - K);
      double dev1 = std::abs(x1 - K);
      if (dev1 > dev * (1.0 + AuditParams::kMonotoneSlack)) {
        out.push_back({step_idx, 'a', dev == 0.0 ? dev1 : dev1 / dev - 1.0});
      }
    }
    if (bracket && params.mu_valid && an >= 0.0 && an <= 1.0 && x >= params.mu1 &&
        x <= params.mu2) {
      if (x1 < params.mu1 || x1 > params.mu2) {
        out.push_back({step_idx, 'b', std::max(params.mu1 - x1, x1 - params.mu2)});
      }
    }
    if (params.ball_active) {
      if (!in_ball && std::abs(x - K) < params.eps_ball) in_ball = true;
      if (in_ball && std::abs(x1 - K) >= params.eps_ball) {
        out.push_back({step_idx, 'c', std::abs(x1 - K) - params.eps_ball});
        in_ball = false;  // keep auditing from the next re-entry
      }
    }
    if (params.band_active) {
      if (!in_band && std::abs(x - K) < params.band_radius) in_band = true;
      if (in_band && std::abs(x1 - K) >= params.band_radius) {
        out.push_back({step_idx, 'd', std::abs(x1 - K) - params.band_radius});
        in_band = false;
      }
    }
  }
  return out;
}

EnsembleResult run_ensemble(const MapModel& model, const ControlScheme& scheme,
                            const NoiseSpec& noise, const EnsembleSpec& spec,
                            const EntryMarkers& markers, const AuditParams* audit_params) {
  if (spec.n_traj < 1) throw ConfigError("run_ensemble: n_traj must be at least 1");
  if (spec.x0.empty()) throw ConfigError("run_ensemble: need at least one x0");

  const int64_t n_traj = spec.n_traj;
  const int64_t n_cols = spec.n_steps + 1;
  const int threads = std::min<int64_t>(resolve_threads(spec.threads), n_traj);

  std::vector<double> dev(static_cast<size_t>(n_traj) * n_cols, kInf);
  struct PerTraj {
    std::optional<int64_t> entry_mu, entry_eps;
    int64_t clamps = 0;
    bool extinct = false, diverged = false;
    int64_t va = 0, vb = 0, vc = 0, vd = 0;
  };
  std::vector<PerTraj> per(n_traj);
  const int64_t n_dump = std::min<int64_t>(spec.dump_max, n_traj);
  std::vector<Trajectory> dumped(static_cast<size_t>(n_dump));

  parallel_for_index(n_traj, threads, [&](int64_t i) {
    double x0 = spec.x0[static_cast<size_t>(i) % spec.x0.size()];
    Trajectory t =
        run_trajectory(model, scheme, noise, x0, spec.n_steps, static_cast<uint32_t>(i), &markers);
    PerTraj& pt = per[i];
    pt.entry_mu = t.first_entry_mu;
    pt.entry_eps = t.first_entry_eps;
    pt.clamps = t.clamp_events;
    pt.extinct = t.extinct;
    pt.diverged = t.diverged;
    double* row = dev.data() + static_cast<size_t>(i) * n_cols;
    for (size_t n = 0; n < t.values.size(); ++n) row[n] = std::abs(t.values[n] - markers.K);
    if (spec.audit && audit_params != nullptr) {
      for (const Violation& v : audit_trajectory(t, model, scheme, noise, *audit_params)) {
        switch (v.kind) {
          case 'a': ++pt.va; break;
          case 'b': ++pt.vb; break;
          case 'c': ++pt.vc; break;
          case 'd': ++pt.vd; break;
        }
      }
    }
    if (i < n_dump) dumped[i] = std::move(t);
  });

  EnsembleStats st;
  st.n_traj = n_traj;
  st.n_steps = spec.n_steps;
  st.q05.resize(n_cols);
  st.q50.resize(n_cols);
  st.q95.resize(n_cols);
  st.frac_eps.resize(n_cols);
  std::vector<double> col(n_traj);
  for (int64_t n = 0; n < n_cols; ++n) {
    int64_t within = 0;
    for (int64_t i = 0; i < n_traj; ++i) {
      col[i] = dev[static_cast<size_t>(i) * n_cols + n];
      if (col[i] < spec.eps) ++within;
    }
    std::sort(col.begin(), col.end());
    st.q05[n] = quantile_sorted(col, 0.05);
    st.q50[n] = quantile_sorted(col, 0.50);
    st.q95[n] = quantile_sorted(col, 0.95);
    st.frac_eps[n] = static_cast<double>(within) / static_cast<double>(n_traj);
  }

  for (int64_t i = 0; i < n_traj; ++i) {
    const PerTraj& pt = per[i];
    if (pt.entry_mu) {
      ++st.n_entered_mu;
      st.mean_entry_mu += static_cast<double>(*pt.entry_mu);
      st.max_entry_mu = std::max(st.max_entry_mu, *pt.entry_mu);
    }
    if (pt.entry_eps) {
      ++st.n_entered_eps;
      st.mean_entry_eps += static_cast<double>(*pt.entry_eps);
      st.max_entry_eps = std::max(st.max_entry_eps, *pt.entry_eps);
    }
    st.clamp_total += pt.clamps;
    st.extinct_count += pt.extinct ? 1 : 0;
    st.diverged_count += pt.diverged ? 1 : 0;
    st.violations_a += pt.va;
    st.violations_b += pt.vb;
    st.violations_c += pt.vc;
    st.violations_d += pt.vd;
  }
  if (st.n_entered_mu > 0) st.mean_entry_mu /= static_cast<double>(st.n_entered_mu);
  if (st.n_entered_eps > 0) st.mean_entry_eps /= static_cast<double>(st.n_entered_eps);
  st.band_escape_count = st.violations_d;

  return {std::move(st), std::move(dumped)};
}

ScanTable parameter_scan(const MapModel& model, const ControlScheme& scheme_template,
                         const NoiseSpec& noise, const std::vector<double>& alpha_grid,
                         const std::vector<double>& l_grid, int64_t n_traj, int64_t n_steps,
                         double eps, const LipschitzData& lip, int threads, double x0) {
  if (alpha_grid.empty() || l_grid.empty()) throw ConfigError("scan: grids must be nonempty");
  const double K = model.equilibrium();
  const int eff_threads = std::min<int64_t>(resolve_threads(threads), n_traj);
  const LipschitzData lips = lip.inflated();

  ScanTable table;
  table.cells.reserve(alpha_grid.size() * l_grid.size());
  for (double alpha : alpha_grid) {
    for (double l : l_grid) {
      ControlScheme scheme = scheme_template;
      scheme.alpha = alpha;
      scheme.l = l;

      std::vector<int> hit(n_traj, 0);
      parallel_for_index(n_traj, eff_threads, [&](int64_t i) {
        SampleStream stream = derive_stream(noise, static_cast<uint64_t>(i));
        double x = x0;
        bool alive = true;
        for (int64_t n = 0; n < n_steps; ++n) {
          StepResult s = step(model, scheme, x, stream.at(static_cast<uint64_t>(n)));
          if (!std::isfinite(s.x)) {
            alive = false;
            break;
          }
          x = s.x;
        }
        hit[i] = (alive && std::abs(x - K) < eps) ? 1 : 0;
      });
      int64_t sum = 0;
      for (int h : hit) sum += h;
      double frac = static_cast<double>(sum) / static_cast<double>(n_traj);

      bool admissible = false;
      if (scheme.kind == SchemeKind::additive_pbc) {
        AdmissibilityReport rep = admissible_additive(alpha, l, model, lips);
        const CriterionReport* band = rep.find(CriterionId::add_band);
        admissible = band != nullptr && band->all_pass();
      } else {
        AdmissibilityReport rep = admissible_multiplicative(alpha, l, lips, noise.nu);
        for (CriterionId id :
             {CriterionId::sym_global, CriterionId::ext_sym, CriterionId::ext_skew,
              CriterionId::hitting}) {
          const CriterionReport* r = rep.find(id);
          if (r != nullptr && r->applicable && r->all_pass()) {
            admissible = true;
            break;
          }
        }
      }
      table.cells.push_back({alpha, l, frac, admissible});
    }
  }
  return table;
}

}  // namespace pbc
