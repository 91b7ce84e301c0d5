#include "pbc/numeric.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace pbc {

BracketResult golden_max(const std::function<double(double)>& fn, double lo, double hi,
                         double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = fn(xm);
  // Keep endpoint values in the running: monotone inputs peak at lo or hi.
  double fa = fn(lo), fb = fn(hi);
  BracketResult best{xm, fm};
  if (fa > best.value) best = {lo, fa};
  if (fb > best.value) best = {hi, fb};
  return best;
}

static BracketResult scan_best(const std::function<double(double)>& fn, double lo, double hi,
                               int64_t n, double tol, bool maximize) {
  if (!(hi > lo)) return {lo, fn(lo)};
  auto g = [&](double x) { return maximize ? fn(x) : -fn(x); };
  double best_x = lo;
  double best_v = g(lo);
  int64_t best_i = 0;
  for (int64_t i = 1; i <= n + 1; ++i) {
    double x = (i == n + 1) ? hi : lo + (hi - lo) * static_cast<double>(i) / (n + 1);
    double v = g(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  double step = (hi - lo) / (n + 1);
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  BracketResult refined = golden_max(g, a, b, tol);
  if (refined.value < best_v) refined = {best_x, best_v};
  (void)best_i;
  if (!maximize) refined.value = -refined.value;
  return refined;
}

BracketResult scan_max(const std::function<double(double)>& fn, double lo, double hi, int64_t n,
                       double tol) {
  return scan_best(fn, lo, hi, n, tol, true);
}

BracketResult scan_min(const std::function<double(double)>& fn, double lo, double hi, int64_t n,
                       double tol) {
  return scan_best(fn, lo, hi, n, tol, false);
}

double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  double fa = fn(lo), fb = fn(hi);
  if (fa == 0.0) return lo;
  if (fb == 0.0) return hi;
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("bisect: no sign change on bracket");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // hit double resolution
    double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fa > 0)) {
      lo = mid;
      fa = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pbc
