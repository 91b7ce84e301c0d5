#include "pbc/control.hpp"

#include <limits>

namespace pbc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared bracket form f(x) - a*(f(x) - x). Every scheme funnels through this
// expression so that the zero-noise reductions agree bit for bit. It also
// preserves fixed points exactly: f(K) == K makes the bracket vanish.
inline double bracket(double a, double x, double fx) { return fx - a * (fx - x); }

inline double clamp0(double v, bool& clamped) {
  if (v < 0.0) {
    clamped = true;
    return 0.0;
  }
  return v;
}

}  // namespace

ControlScheme ControlScheme::uncontrolled() { return {SchemeKind::uncontrolled}; }

ControlScheme ControlScheme::deterministic(double alpha) {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) throw ConfigError("scheme: alpha must lie in [0, 1)");
  ControlScheme s;
  s.kind = SchemeKind::deterministic_pbc;
  s.alpha = alpha;
  s.seq = AlphaSequence::constant;
  return s;
}

ControlScheme ControlScheme::deterministic_iid(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi <= 1.0) || !(lo <= hi)) {
    throw ConfigError("scheme: iid alpha interval must satisfy 0 <= lo <= hi <= 1");
  }
  ControlScheme s;
  s.kind = SchemeKind::deterministic_pbc;
  s.seq = AlphaSequence::iid_uniform;
  s.seq_lo = lo;
  s.seq_hi = hi;
  s.alpha = 0.5 * (lo + hi);
  return s;
}

ControlScheme ControlScheme::multiplicative(double alpha, double l) {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) throw ConfigError("scheme: alpha must lie in [0, 1)");
  if (!(l >= 0.0)) throw ConfigError("scheme: l must be nonnegative");
  ControlScheme s;
  s.kind = SchemeKind::multiplicative_pbc;
  s.alpha = alpha;
  s.l = l;
  return s;
}

ControlScheme ControlScheme::additive(double alpha, double l) {
  ControlScheme s = multiplicative(alpha, l);
  s.kind = SchemeKind::additive_pbc;
  return s;
}

ControlScheme ControlScheme::map_multiplicative(double l) {
  if (!(l >= 0.0)) throw ConfigError("scheme: l must be nonnegative");
  ControlScheme s;
  s.kind = SchemeKind::map_multiplicative;
  s.l = l;
  return s;
}

double pbc_map(double alpha, const MapModel& model, double x) {
  return alpha * x + (1.0 - alpha) * model(x);
}

StepResult step(const MapModel& model, const ControlScheme& scheme, double x, double xi) {
  const double fx = model(x);
  bool clamped = false;
  switch (scheme.kind) {
    case SchemeKind::uncontrolled:
      return {fx, false, kNaN};
    case SchemeKind::deterministic_pbc: {
      double a = scheme.alpha;
      if (scheme.seq == AlphaSequence::iid_uniform) {
        a = scheme.seq_lo + (scheme.seq_hi - scheme.seq_lo) * (0.5 * (xi + 1.0));
      }
      return {bracket(a, x, fx), false, a};
    }
    case SchemeKind::multiplicative_pbc: {
      double a = scheme.alpha + scheme.l * xi;
      double v = clamp0(bracket(a, x, fx), clamped);
      return {v, clamped, a};
    }
    case SchemeKind::additive_pbc: {
      double v = clamp0(bracket(scheme.alpha, x, fx) + scheme.l * xi, clamped);
      return {v, clamped, scheme.alpha};
    }
    case SchemeKind::map_multiplicative: {
      double v = clamp0((1.0 + scheme.l * xi) * fx, clamped);
      return {v, clamped, kNaN};
    }
  }
  return {fx, false, kNaN};
}

}  // namespace pbc
