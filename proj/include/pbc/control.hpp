#pragma once

#include <cmath>

#include "pbc/errors.hpp"
#include "pbc/maps.hpp"

namespace pbc {

enum class SchemeKind {
  uncontrolled,
  deterministic_pbc,
  multiplicative_pbc,
  additive_pbc,
  map_multiplicative,
};

enum class AlphaSequence { constant, iid_uniform };

// Which controlled recurrence advances the state. Admissibility of (alpha, l)
// is deliberately not enforced here: out-of-range parameter sweeps must still
// run, the analysis module reports the violations.
struct ControlScheme {
  SchemeKind kind = SchemeKind::uncontrolled;
  double alpha = 0.0;
  double l = 0.0;
  AlphaSequence seq = AlphaSequence::constant;
  double seq_lo = 0.0;
  double seq_hi = 0.0;

  static ControlScheme uncontrolled();
  static ControlScheme deterministic(double alpha);
  static ControlScheme deterministic_iid(double lo, double hi);
  static ControlScheme multiplicative(double alpha, double l);
  static ControlScheme additive(double alpha, double l);
  static ControlScheme map_multiplicative(double l);
};

// Predicted-image blend alpha*x + (1-alpha)*f(x).
double pbc_map(double alpha, const MapModel& model, double x);

struct StepResult {
  double x;
  bool clamped;             // the max{., 0} truncation fired
  double realized_alpha;    // control value actually applied; NaN when the
                            // scheme has no control parameter
};

// One transition of the selected recurrence. xi is the perturbation draw for
// this step (in [-1, nu]); for the iid deterministic sequence it doubles as
// the uniform driver. Clamping is data, not an error.
StepResult step(const MapModel& model, const ControlScheme& scheme, double x, double xi);

}  // namespace pbc
