#include "pbc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbc/numeric.hpp"

namespace pbc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int64_t kIntMax = std::numeric_limits<int64_t>::max();

Clause gt(std::string name, double lhs, double rhs) {
  double margin = lhs - rhs;
  return {std::move(name), margin > 0.0, margin};
}

Clause lt(std::string name, double lhs, double rhs) {
  double margin = rhs - lhs;
  return {std::move(name), margin > 0.0, margin};
}

Clause in_open(std::string name, double v, const Interval& iv) {
  double margin = std::min(v - iv.lo, iv.hi - v);
  return {std::move(name), margin > 0.0, margin};
}

CriterionReport make_report(CriterionId id, std::string key) {
  CriterionReport rep;
  rep.id = id;
  rep.key = std::move(key);
  return rep;
}

void attach_interval(CriterionReport& rep, double lo, double hi) {
  rep.l_interval = Interval{lo, hi};
}

}  // namespace

bool CriterionReport::all_pass() const {
  if (!applicable) return true;
  for (const Clause& c : clauses) {
    if (!c.pass) return false;
  }
  return true;
}

bool AdmissibilityReport::any_fail() const {
  for (const CriterionReport& r : criteria) {
    if (!r.applicable) continue;
    for (const Clause& c : r.clauses) {
      if (!c.pass) return true;
    }
  }
  return false;
}

const CriterionReport* AdmissibilityReport::find(CriterionId id) const {
  for (const CriterionReport& r : criteria) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

InvariantInterval invariant_interval(const MapModel& model) {
  if (!model.has_critical_point()) {
    throw AssumptionError("invariant_interval: " + model.describe() +
                          " has no decreasing stretch below K; run verify_assumptions");
  }
  const double c = model.critical_point();
  auto f = [&](double x) { return model(x); };

  // Smallest maximizer of f on [0, c]. The scan breaks ties toward zero; for
  // the registered unimodal maps the peak sits exactly at c, so snap to the
  // closed-form threshold when the refined argmax lands on it.
  BracketResult peak = scan_max(f, 0.0, c, 20000, 1e-10);
  double mu0 = peak.x;
  if (std::abs(mu0 - c) < 1e-8 * std::max(1.0, c) && f(c) >= peak.value - 1e-12) mu0 = c;

  // mu2 must dominate every value of f; widen the evaluated maximum by a
  // relative margin covering the argmax resolution and evaluation rounding.
  double mu2 = f(mu0) * (1.0 + 1e-12);
  double mu1 = f(mu2);

  const double K = model.equilibrium();
  if (!(mu1 < K && K < mu2)) {
    throw AssumptionError("invariant_interval: derived interval does not straddle K");
  }
  return {mu0, mu1, mu2};
}

Rate contraction_rate_det(double a, double b) {
  double g = std::max(b, 1.0 - a);
  return {g, g < 1.0};
}

Rate contraction_rate(double alpha, double l, double nu, RateMode mode) {
  double g = kNaN;
  switch (mode) {
    case RateMode::det_variable:
      // Callers with an explicit [a, b] band use contraction_rate_det; a
      // constant alpha collapses to max{alpha, 1 - alpha}.
      g = std::max(alpha, 1.0 - alpha);
      break;
    case RateMode::multiplicative:
      g = std::max(alpha + l * nu, 1.0 - alpha + l);
      break;
    case RateMode::additive:
      g = std::max(alpha, 1.0 - alpha);
      break;
  }
  return {g, g < 1.0};
}

AdmissibilityReport admissible_multiplicative(double alpha, double l, const LipschitzData& lip,
                                              double nu) {
  if (!(lip.M >= lip.M_eps) || !(lip.M_eps > 0.0)) {
    throw ConfigError("admissible_multiplicative: need M >= M_eps > 0");
  }
  if (!(nu >= 1.0)) throw ConfigError("admissible_multiplicative: nu must be at least 1");

  const double m = 1.0 - 1.0 / lip.M;       // global threshold
  const double me = 1.0 - 1.0 / lip.M_eps;  // local threshold
  AdmissibilityReport report;

  {
    CriterionReport r = make_report(CriterionId::sym_global, "sym_global");
    r.applicable = (nu == 1.0);
    if (r.applicable) {
      r.clauses.push_back(gt("alpha_above_global", alpha, m));
      r.clauses.push_back(lt("alpha_below_one", alpha, 1.0));
      double hi = std::min(alpha - m, 1.0 - alpha);
      r.clauses.push_back(lt("noise_upper", l, hi));
      attach_interval(r, 0.0, hi);
    }
    report.criteria.push_back(std::move(r));
  }
  {
    CriterionReport r = make_report(CriterionId::local_trap, "local_trap");
    r.clauses.push_back(gt("alpha_above_local", alpha, me));
    r.clauses.push_back(lt("alpha_below_one", alpha, 1.0));
    double hi = std::min(alpha - me, (1.0 - alpha) / nu);
    r.clauses.push_back(lt("noise_upper", l, hi));
    attach_interval(r, 0.0, hi);
    report.criteria.push_back(std::move(r));
  }
  {
    CriterionReport r = make_report(CriterionId::hitting, "hitting");
    double a = alpha - l;
    double b = alpha + l * nu;
    r.clauses.push_back(gt("a_above_local", a, me));
    r.clauses.push_back(gt("b_above_global", b, m));
    r.clauses.push_back(lt("b_below_one", b, 1.0));
    double lo = std::max((m - alpha) / nu, 0.0);
    double hi = std::min(alpha - me, (1.0 - alpha) / nu);
    attach_interval(r, lo, hi);
    report.criteria.push_back(std::move(r));
  }
  {
    CriterionReport r = make_report(CriterionId::ext_sym, "ext_sym");
    r.applicable = (nu == 1.0);
    if (r.applicable) {
      double thr = 1.0 - 0.5 / lip.M_eps - 0.5 / lip.M;
      r.clauses.push_back(gt("alpha_above_midpoint", alpha, thr));
      r.clauses.push_back(lt("alpha_below_one", alpha, 1.0));
      Interval iv{std::max(m - alpha, 0.0), std::min(alpha - me, 1.0 - alpha)};
      r.clauses.push_back(in_open("noise_in_interval", l, iv));
      r.l_interval = iv;
    }
    report.criteria.push_back(std::move(r));
  }
  {
    CriterionReport r = make_report(CriterionId::ext_skew, "ext_skew");
    r.applicable = (nu > 1.0);
    if (r.applicable) {
      r.clauses.push_back(gt("alpha_above_local", alpha, me));
      r.clauses.push_back(lt("alpha_below_one", alpha, 1.0));
      r.clauses.push_back(gt("nu_gap", nu * (alpha - me), m - alpha));
      Interval iv{std::max(m - alpha, 0.0) / nu, std::min(alpha - me, (1.0 - alpha) / nu)};
      r.clauses.push_back(in_open("noise_in_interval", l, iv));
      r.l_interval = iv;
    }
    report.criteria.push_back(std::move(r));
  }

  for (const CriterionReport& r : report.criteria) {
    if (!r.applicable || !r.l_interval || r.l_interval->empty()) continue;
    if (!report.widest_interval || r.l_interval->width() > report.widest_interval->width()) {
      report.widest_interval = r.l_interval;
    }
  }
  return report;
}

AdmissibilityReport admissible_additive(double alpha, double l, const MapModel& model,
                                        const LipschitzData& lip,
                                        std::optional<double> target_width) {
  const double m = 1.0 - 1.0 / lip.M;
  const double K = model.equilibrium();
  const double c = model.critical_point();
  const double gamma = std::max(alpha, 1.0 - alpha);
  AdmissibilityReport report;

  {
    CriterionReport r = make_report(CriterionId::add_band, "add_band");
    r.clauses.push_back(gt("alpha_above_global", alpha, m));
    r.clauses.push_back(lt("alpha_below_one", alpha, 1.0));
    double hi = (1.0 - gamma) * (K - c);
    r.clauses.push_back(lt("noise_upper", l, hi));
    attach_interval(r, 0.0, hi);
    report.criteria.push_back(std::move(r));
  }
  if (target_width) {
    CriterionReport r = make_report(CriterionId::add_width, "add_width");
    double lmax = max_additive_noise(alpha, model, *target_width);
    r.clauses.push_back(lt("noise_for_width", l, lmax));
    attach_interval(r, 0.0, lmax);
    report.criteria.push_back(std::move(r));
  }

  for (const CriterionReport& r : report.criteria) {
    if (!r.l_interval || r.l_interval->empty()) continue;
    if (!report.widest_interval || r.l_interval->width() > report.widest_interval->width()) {
      report.widest_interval = r.l_interval;
    }
  }
  return report;
}

HittingConstants hitting_constants(const MapModel& model, const LipschitzData& lip, double alpha,
                                   double l, double nu, double eps, bool force) {
  const double m = 1.0 - 1.0 / lip.M;
  const double me = 1.0 - 1.0 / lip.M_eps;
  const double a = alpha - l;
  const double b = alpha + l * nu;

  std::vector<Clause> clauses;
  clauses.push_back(gt("a_above_local", a, me));
  clauses.push_back(gt("b_above_global", b, m));
  clauses.push_back(lt("b_below_one", b, 1.0));
  bool ok = std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.pass; });
  if (!ok && !force) {
    std::string msg = "hitting_constants: hypotheses fail:";
    for (const Clause& c : clauses) {
      if (!c.pass) msg += " " + c.name + " margin " + format_double(c.margin);
    }
    throw HypothesisError(msg);
  }

  InvariantInterval iv = invariant_interval(model);
  const double K = model.equilibrium();
  const double c = model.critical_point();

  // Drift floor of f(x) - x on [mu1, c]; frequently attained at an endpoint,
  // so the dense scan keeps both in play.
  double d1 = scan_min([&](double x) { return model(x) - x; }, iv.mu1, c, 20000, 1e-12).value;

  double denom = (1.0 - alpha - nu * l) * d1;
  int64_t N1 = kIntMax;
  if (denom > 0.0) {
    int64_t fl = saturating_floor((c - iv.mu1) / denom);
    N1 = fl >= kIntMax - 1 ? kIntMax : fl + 1;
  }

  double a1 = (m < b) ? 0.5 * (m + b) : kNaN;  // midpoint of (1 - 1/M, alpha + l*nu)

  // Halving the strict bound keeps (a, b) inside (delta, 1 - delta) with
  // margin to spare.
  double delta = 0.5 * std::min(a, 1.0 - b);

  double gamma = std::max(b, 1.0 - a);
  int64_t N2 = kIntMax;
  if (gamma < 1.0 && gamma > 0.0) {
    double worst = std::max({(K - c) / eps, (iv.mu2 - K) / eps, 1.0});
    int64_t fl = saturating_floor(std::log(worst) / (-std::log(gamma)));
    N2 = fl >= kIntMax - 2 ? kIntMax : fl + 2;
  }

  int64_t r_escape = kIntMax;
  if (l > 0.0) {
    int64_t fl = saturating_floor(2.0 * c / l);
    r_escape = fl >= kIntMax - 1 ? kIntMax : fl + 1;
  }

  return {d1, N1, N2, a1, delta, gamma, r_escape, ok, std::move(clauses)};
}

double blur_radius(double alpha, double l) {
  double gamma = std::max(alpha, 1.0 - alpha);
  if (!(gamma < 1.0)) throw ConfigError("blur_radius: no contraction at alpha = " + format_double(alpha));
  return l / (1.0 - gamma);
}

double max_additive_noise(double alpha, const MapModel& model, double target_half_width) {
  double gamma = std::max(alpha, 1.0 - alpha);
  if (!(gamma < 1.0)) throw ConfigError("max_additive_noise: no contraction");
  if (!(target_half_width > 0.0)) throw ConfigError("max_additive_noise: width must be positive");
  double K = model.equilibrium();
  double c = model.critical_point();
  // Band radius l/(1-gamma) plus slack eps <= width/2 must fit in the target.
  return std::min(0.5 * target_half_width * (1.0 - gamma), (1.0 - gamma) * (K - c));
}

}  // namespace pbc
