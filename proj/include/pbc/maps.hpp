#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbc/errors.hpp"

namespace pbc {

enum class MapKind {
  ricker,
  truncated_logistic,
  beverton_holt_1,
  beverton_holt_2,
  singer,
  custom,
};

// Rational tail piece num / (den_a * x + den_b), used for x > x_break.
// Together with a polynomial head this covers the piecewise maps in the
// registry without an expression interpreter.
struct RationalTail {
  double x_break;
  double num;
  double den_a;
  double den_b;
};

// A one-dimensional population map f together with its structural data:
// the unique positive equilibrium K (f(K) = K), the threshold c < K past
// which f is monotone decreasing (when it exists), and an upper truncation
// bound for numerical searches. Models are immutable after construction and
// safe to share across threads.
class MapModel {
public:
  static MapModel ricker(double r);
  static MapModel truncated_logistic(double r);
  static MapModel beverton_holt_1(double A, double B, double gamma);
  static MapModel beverton_holt_2(double A, double B, double gamma);
  static MapModel singer();
  // Polynomial head (ascending coefficients) with an optional rational tail.
  // Evaluations are clamped at zero.
  static MapModel custom(std::vector<double> poly, std::optional<RationalTail> tail);

  double operator()(double x) const;

  MapKind kind() const { return kind_; }
  double equilibrium() const { return K_; }

  // True when the map attains its maximum strictly below the equilibrium,
  // i.e. a decreasing stretch [c, inf) with c < K exists.
  bool has_critical_point() const { return has_critical_; }
  // Throws AssumptionError when there is no critical point below K (map
  // monotone increasing up to the equilibrium).
  double critical_point() const;

  // Upper bound used by grid searches; everything the dynamics can reach is
  // below it.
  double domain_bound() const { return domain_bound_; }

  std::string describe() const;

private:
  MapModel() = default;
  void finalize_structure();

  MapKind kind_ = MapKind::custom;
  double r_ = 0.0, A_ = 0.0, B_ = 0.0, g_ = 0.0;
  std::vector<double> poly_;
  std::optional<RationalTail> tail_;

  double K_ = 0.0;
  double c_ = 0.0;  // valid only when has_critical_
  bool has_critical_ = false;
  double domain_bound_ = 0.0;
};

// Result of a Lipschitz-type ratio search sup |f(x)-K| / |x-K|. `value` is a
// certified lower bound of the sup; `tolerance` is the x-resolution of the
// final refinement step.
struct LipschitzEstimate {
  double value;
  double tolerance;
  double argmax;
  int64_t grid;
};

// Global constant over (0, search_bound], grid scan plus golden-section
// refinement at the argmax. A small window around K is excluded and replaced
// by the derivative limit |f'(K)|.
LipschitzEstimate estimate_global_lipschitz(const MapModel& model, double search_bound,
                                            int64_t grid_size);

// Local constant over (K - eps, K + eps) \ {K}, same scheme.
LipschitzEstimate estimate_local_lipschitz(const MapModel& model, double eps, int64_t grid_size);

// Certified pair (M, M_eps) for one model. M uses the model's domain bound
// unless an explicit search bound is given.
struct LipschitzData {
  double M;
  double M_eps;
  double eps;
  int64_t grid;

  // Pessimistic inflation for admissibility checks: grid estimates are lower
  // bounds of a sup, so the checker works with slightly larger constants.
  LipschitzData inflated() const { return {M * (1.0 + 1e-6), M_eps * (1.0 + 1e-6), eps, grid}; }
};

LipschitzData certify_lipschitz(const MapModel& model, double eps, int64_t grid_size,
                                std::optional<double> search_bound = std::nullopt);

struct AssumptionClause {
  bool pass = true;
  std::optional<double> counterexample;
};

// Sampled verification of the structural assumptions. Failures are report
// entries, never exceptions.
struct AssumptionReport {
  AssumptionClause positivity;                // f(x) > 0 on (0, bound]
  AssumptionClause growth_below_equilibrium;  // f(x) > x on (0, K)
  AssumptionClause decay_above_equilibrium;   // f(x) < x on (K, bound]
  AssumptionClause monotone_tail;             // f non-increasing on [c, bound]

  bool all() const {
    return positivity.pass && growth_below_equilibrium.pass && decay_above_equilibrium.pass &&
           monotone_tail.pass;
  }
};

AssumptionReport verify_assumptions(const MapModel& model, int64_t grid_size);

}  // namespace pbc
