#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

namespace pbc {

// Search helpers shared by the map registry and the constant derivations.
// All of them are plain scalar routines on doubles; tolerances are absolute.

struct BracketResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section maximization of fn on [lo, hi] to absolute x-tolerance tol.
// fn is assumed unimodal on the bracket; on monotone inputs the result
// converges to the corresponding endpoint.
BracketResult golden_max(const std::function<double(double)>& fn, double lo, double hi,
                         double tol);

inline BracketResult golden_min(const std::function<double(double)>& fn, double lo, double hi,
                                double tol) {
  BracketResult r = golden_max([&](double x) { return -fn(x); }, lo, hi, tol);
  return {r.x, -r.value};
}

// Dense scan over [lo, hi] with n interior points plus both endpoints,
// followed by golden-section refinement around the best grid point. Ties on
// the grid break toward the smallest x.
BracketResult scan_max(const std::function<double(double)>& fn, double lo, double hi, int64_t n,
                       double tol);
BracketResult scan_min(const std::function<double(double)>& fn, double lo, double hi, int64_t n,
                       double tol);

// Bisection for a root of fn on [lo, hi]; requires a sign change.
double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol);

// Central difference derivative.
inline double central_derivative(const std::function<double(double)>& fn, double x, double h) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

// floor() saturated into int64 range; used for step-count constants whose
// formulas blow up when their denominators are tiny.
inline int64_t saturating_floor(double t) {
  if (!std::isfinite(t)) return std::numeric_limits<int64_t>::max();
  if (t >= 9.2e18) return std::numeric_limits<int64_t>::max();
  if (t <= -9.2e18) return std::numeric_limits<int64_t>::min();
  return static_cast<int64_t>(std::floor(t));
}

// Shortest round-trip decimal form. All numeric output (CSV cells, report
// lines) goes through here so reruns are byte-comparable.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(int64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace pbc
