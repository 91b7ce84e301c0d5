#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbc/control.hpp"
#include "pbc/maps.hpp"

namespace pbc {

// Invariant interval data. mu0 is the smallest maximizer of f on [0, c],
// mu2 = f(mu0) bounds every value of f from above (reported with a one part
// in 1e12 certification margin), and mu1 = f(mu2). The controlled map sends
// [mu1, mu2] into itself for every control value in [0, 1].
struct InvariantInterval {
  double mu0;
  double mu1;
  double mu2;
};

InvariantInterval invariant_interval(const MapModel& model);

enum class RateMode { det_variable, multiplicative, additive };

struct Rate {
  double gamma;
  bool contracts;  // gamma < 1
};

// Worst-case one-step shrink factor of |x - K| once trajectories are past
// the critical threshold.
//   det_variable (alpha_n in [a, b]): max{b, 1 - a}
//   multiplicative:                  max{alpha + l*nu, 1 - alpha + l}
//   additive:                        max{alpha, 1 - alpha}
Rate contraction_rate_det(double a, double b);
Rate contraction_rate(double alpha, double l, double nu, RateMode mode);

// Stability criteria evaluated by the admissibility checker. Each one is a
// set of strict inequalities on (alpha, l, nu, M, M_eps) plus an open
// interval of admissible noise intensities.
enum class CriterionId {
  sym_global,   // symmetric noise, global Lipschitz constant only
  local_trap,   // trap in the local Lipschitz ball once entered
  hitting,      // a.s. entry into the local ball (two-sided bounds)
  ext_sym,      // extended range, symmetric support
  ext_skew,     // extended range, right-skewed support (nu > 1)
  add_band,     // additive noise: eventual band around K
  add_width,    // additive noise: intensity for a target band width
};

struct Clause {
  std::string name;
  bool pass;
  double margin;  // positive means satisfied; strict inequalities, zero fails
};

struct Interval {
  double lo;
  double hi;
  bool empty() const { return !(lo < hi); }
  bool contains(double v) const { return lo < v && v < hi; }
  double width() const { return empty() ? 0.0 : hi - lo; }
};

struct CriterionReport {
  CriterionId id;
  std::string key;
  bool applicable = true;
  std::vector<Clause> clauses;
  std::optional<Interval> l_interval;

  bool all_pass() const;
};

struct AdmissibilityReport {
  std::vector<CriterionReport> criteria;
  std::optional<Interval> widest_interval;

  bool any_fail() const;
  const CriterionReport* find(CriterionId id) const;
};

// Multiplicative-noise criteria for the given control point. The caller
// passes certified Lipschitz data (use LipschitzData::inflated() when the
// constants come from grid estimation).
AdmissibilityReport admissible_multiplicative(double alpha, double l, const LipschitzData& lip,
                                              double nu);

// Additive-noise criteria; target_width, when present, adds the clause for a
// prescribed band width.
AdmissibilityReport admissible_additive(double alpha, double l, const MapModel& model,
                                        const LipschitzData& lip,
                                        std::optional<double> target_width = std::nullopt);

// Constants controlling the a.s. hitting argument: the drift floor d1 on
// [mu1, c], the step bounds N1 and N2, the auxiliary control level a1, the
// margin delta = min{a, 1-b}/2 placing the realized control values strictly
// inside (delta, 1-delta), and the escape count r for the additive equation.
// Step counts saturate at the int64 maximum when their denominators
// degenerate.
struct HittingConstants {
  double d1;
  int64_t N1;
  int64_t N2;
  double a1;
  double delta;
  double gamma;
  int64_t r_escape;
  bool hypotheses_ok;
  std::vector<Clause> hypothesis_clauses;
};

HittingConstants hitting_constants(const MapModel& model, const LipschitzData& lip, double alpha,
                                   double l, double nu, double eps, bool force = false);

// Radius l / (1 - gamma) of the band additive-noise trajectories eventually
// cannot leave, gamma = max{alpha, 1 - alpha}.
double blur_radius(double alpha, double l);

// Largest admissible additive intensity that keeps the eventual band inside
// a half-width of target_half_width around K.
double max_additive_noise(double alpha, const MapModel& model, double target_half_width);

}  // namespace pbc
