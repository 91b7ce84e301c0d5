#include "pbc/maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbc/numeric.hpp"

namespace pbc {
namespace {

constexpr double kRootTol = 1e-12;      // fixed-point searches
constexpr double kCriticalTol = 1e-10;  // argmax searches
// Removable singularity of the ratio |f(x)-K|/|x-K|: points this close to K
// are skipped and the derivative limit is used instead.
constexpr double kRatioWindow = 1e-8;

double eval_poly(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

double MapModel::operator()(double x) const {
  switch (kind_) {
    case MapKind::ricker:
      return x * std::exp(r_ * (1.0 - x));
    case MapKind::truncated_logistic:
      if (x >= 1.0) return 0.0;
      return std::max(r_ * x * (1.0 - x), 0.0);
    case MapKind::beverton_holt_1:
      return A_ * x / (1.0 + B_ * std::pow(x, g_));
    case MapKind::beverton_holt_2:
      return A_ * x / std::pow(1.0 + B_ * x, g_);
    case MapKind::singer:
    case MapKind::custom: {
      if (tail_ && x > tail_->x_break) {
        return std::max(tail_->num / (tail_->den_a * x + tail_->den_b), 0.0);
      }
      return std::max(eval_poly(poly_, x), 0.0);
    }
  }
  return 0.0;
}

double MapModel::critical_point() const {
  if (!has_critical_) {
    throw AssumptionError("no critical point below K: " + describe() +
                          " is monotone increasing up to its equilibrium");
  }
  return c_;
}

std::string MapModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MapKind::ricker:
      os << "ricker(r=" << r_ << ")";
      break;
    case MapKind::truncated_logistic:
      os << "truncated_logistic(r=" << r_ << ")";
      break;
    case MapKind::beverton_holt_1:
      os << "beverton_holt_1(A=" << A_ << ",B=" << B_ << ",gamma=" << g_ << ")";
      break;
    case MapKind::beverton_holt_2:
      os << "beverton_holt_2(A=" << A_ << ",B=" << B_ << ",gamma=" << g_ << ")";
      break;
    case MapKind::singer:
      os << "singer";
      break;
    case MapKind::custom:
      os << "custom(poly degree " << (poly_.empty() ? 0 : poly_.size() - 1) << ")";
      break;
  }
  return os.str();
}

void MapModel::finalize_structure() {
  const MapModel& f = *this;
  // Maximum of f below (or at) the equilibrium decides whether a decreasing
  // tail starts under K. Closed-form kinds have already set K_ and c_; the
  // piecewise kinds search for both.
  if (kind_ == MapKind::singer || kind_ == MapKind::custom) {
    // Locate the equilibrium: first sign change of f(x) - x scanning up from
    // zero, bracket doubled until f drops below the identity.
    auto gap = [&](double x) { return f(x) - x; };
    double hi = 1.0;
    int doublings = 0;
    while (gap(hi) > 0.0 && doublings++ < 60) hi *= 2.0;
    if (gap(hi) > 0.0) throw AssumptionError("custom map: no positive fixed point found");
    double lo = 0.0;
    const int n = 4096;
    double prev = hi / n;
    if (gap(prev) <= 0.0) throw AssumptionError("custom map: f(x) <= x immediately above zero");
    for (int i = 2; i <= n; ++i) {
      double x = hi * static_cast<double>(i) / n;
      if (gap(x) <= 0.0) {
        lo = prev;
        hi = x;
        break;
      }
      prev = x;
    }
    K_ = bisect(gap, lo, hi, kRootTol);

    BracketResult peak = scan_max([&](double x) { return f(x); }, 0.0, K_, 20000, kCriticalTol);
    has_critical_ = peak.x < K_ - 1e-8 * std::max(1.0, K_) && peak.value > f(K_);
    c_ = peak.x;
  } else {
    has_critical_ = c_ < K_;
  }

  double fmax;
  if (has_critical_) {
    fmax = f(c_);
  } else {
    // Increasing-to-K maps: take the largest value seen on a generous range.
    fmax = scan_max([&](double x) { return f(x); }, 0.0, 4.0 * K_, 20000, kCriticalTol).value;
  }
  domain_bound_ = std::max(2.0 * K_, 1.01 * fmax);
}

MapModel MapModel::ricker(double r) {
  if (!(r > 0.0)) throw ConfigError("ricker: r must be positive");
  MapModel m;
  m.kind_ = MapKind::ricker;
  m.r_ = r;
  m.K_ = 1.0;
  m.c_ = 1.0 / r;
  m.finalize_structure();
  return m;
}

MapModel MapModel::truncated_logistic(double r) {
  if (!(r > 1.0)) throw ConfigError("truncated_logistic: r must exceed 1");
  MapModel m;
  m.kind_ = MapKind::truncated_logistic;
  m.r_ = r;
  m.K_ = 1.0 - 1.0 / r;
  m.c_ = 0.5;
  m.finalize_structure();
  return m;
}

MapModel MapModel::beverton_holt_1(double A, double B, double gamma) {
  if (!(A > 1.0) || !(B > 0.0) || !(gamma > 1.0)) {
    throw ConfigError("beverton_holt_1: require A > 1, B > 0, gamma > 1");
  }
  MapModel m;
  m.kind_ = MapKind::beverton_holt_1;
  m.A_ = A;
  m.B_ = B;
  m.g_ = gamma;
  m.K_ = std::pow((A - 1.0) / B, 1.0 / gamma);
  m.c_ = std::pow(1.0 / (B * (gamma - 1.0)), 1.0 / gamma);
  m.finalize_structure();
  return m;
}

MapModel MapModel::beverton_holt_2(double A, double B, double gamma) {
  if (!(A > 1.0) || !(B > 0.0) || !(gamma > 1.0)) {
    throw ConfigError("beverton_holt_2: require A > 1, B > 0, gamma > 1");
  }
  MapModel m;
  m.kind_ = MapKind::beverton_holt_2;
  m.A_ = A;
  m.B_ = B;
  m.g_ = gamma;
  m.K_ = (std::pow(A, 1.0 / gamma) - 1.0) / B;
  m.c_ = 1.0 / (B * (gamma - 1.0));
  m.finalize_structure();
  return m;
}

MapModel MapModel::singer() {
  MapModel m;
  m.kind_ = MapKind::singer;
  m.poly_ = {0.0, 7.86, -23.31, 28.75, -13.30};
  double a = eval_poly(m.poly_, 0.99);
  m.tail_ = RationalTail{0.99, a, 1.0, 0.01};
  m.finalize_structure();
  return m;
}

MapModel MapModel::custom(std::vector<double> poly, std::optional<RationalTail> tail) {
  if (poly.empty()) throw ConfigError("custom map: empty coefficient list");
  if (tail && !(tail->x_break > 0.0)) throw ConfigError("custom map: tail breakpoint must be positive");
  MapModel m;
  m.kind_ = MapKind::custom;
  m.poly_ = std::move(poly);
  m.tail_ = tail;
  m.finalize_structure();
  return m;
}

namespace {

LipschitzEstimate estimate_on(const MapModel& model, double lo, double hi, int64_t grid_size) {
  const double K = model.equilibrium();
  auto ratio = [&](double x) { return std::abs(model(x) - K) / std::abs(x - K); };

  double best_v = 0.0, best_x = lo;
  const double step = (hi - lo) / static_cast<double>(grid_size);
  for (int64_t i = 1; i <= grid_size; ++i) {
    double x = lo + step * static_cast<double>(i);
    if (std::abs(x - K) < kRatioWindow) continue;
    double v = ratio(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  // Refine inside the bracketing cells, keeping clear of the K window.
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  if (a < K + kRatioWindow && b > K - kRatioWindow) {
    if (best_x < K) {
      b = std::min(b, K - kRatioWindow);
    } else {
      a = std::max(a, K + kRatioWindow);
    }
  }
  if (b > a) {
    BracketResult refined = golden_max(ratio, a, b, kCriticalTol);
    if (refined.value > best_v) {
      best_v = refined.value;
      best_x = refined.x;
    }
  }

  // Ratio limit at the removable singularity.
  double h = 1e-5 * std::max(1.0, std::abs(K));
  double dK = std::abs(central_derivative([&](double x) { return model(x); }, K, h));
  if (dK > best_v) {
    best_v = dK;
    best_x = K;
  }
  return {best_v, kCriticalTol, best_x, grid_size};
}

}  // namespace

LipschitzEstimate estimate_global_lipschitz(const MapModel& model, double search_bound,
                                            int64_t grid_size) {
  if (!(search_bound >= 2.0 * model.equilibrium())) {
    throw ConfigError("estimate_global_lipschitz: search bound must be at least 2K");
  }
  if (grid_size < 1000) throw ConfigError("estimate_global_lipschitz: grid too coarse");
  return estimate_on(model, 0.0, search_bound, grid_size);
}

LipschitzEstimate estimate_local_lipschitz(const MapModel& model, double eps, int64_t grid_size) {
  const double K = model.equilibrium();
  if (!(eps > 0.0) || !(eps < K)) {
    throw ConfigError("estimate_local_lipschitz: eps must lie in (0, K)");
  }
  if (grid_size < 1000) throw ConfigError("estimate_local_lipschitz: grid too coarse");
  LipschitzEstimate e = estimate_on(model, K - eps, K + eps, grid_size);
  e.grid = grid_size;
  return e;
}

LipschitzData certify_lipschitz(const MapModel& model, double eps, int64_t grid_size,
                                std::optional<double> search_bound) {
  double bound = search_bound.value_or(model.domain_bound());
  LipschitzEstimate global = estimate_global_lipschitz(model, bound, grid_size);
  LipschitzEstimate local = estimate_local_lipschitz(model, eps, grid_size);
  return {global.value, std::min(local.value, global.value), eps, grid_size};
}

AssumptionReport verify_assumptions(const MapModel& model, int64_t grid_size) {
  const int64_t n = std::max<int64_t>(grid_size, 1000);
  const double K = model.equilibrium();
  const double bound = model.domain_bound();
  AssumptionReport rep;

  for (int64_t i = 1; i <= n && rep.positivity.pass; ++i) {
    double x = bound * static_cast<double>(i) / static_cast<double>(n);
    if (!(model(x) > 0.0)) rep.positivity = {false, x};
  }
  for (int64_t i = 1; i <= n && rep.growth_below_equilibrium.pass; ++i) {
    double x = K * static_cast<double>(i) / static_cast<double>(n + 1);
    if (!(model(x) > x)) rep.growth_below_equilibrium = {false, x};
  }
  for (int64_t i = 1; i <= n && rep.decay_above_equilibrium.pass; ++i) {
    double x = K + (bound - K) * static_cast<double>(i) / static_cast<double>(n);
    if (!(model(x) < x)) rep.decay_above_equilibrium = {false, x};
  }

  double tail_start = model.has_critical_point() ? model.critical_point() : K;
  double prev = model(tail_start);
  for (int64_t i = 1; i <= n; ++i) {
    double x = tail_start + (bound - tail_start) * static_cast<double>(i) / static_cast<double>(n);
    double v = model(x);
    if (v > prev + 1e-12) {
      rep.monotone_tail = {false, x};
      break;
    }
    prev = v;
  }
  if (!model.has_critical_point() && rep.monotone_tail.pass) {
    // Decreasing beyond K is not enough: the assumption needs a decreasing
    // stretch that starts strictly below the equilibrium.
    rep.monotone_tail = {false, K};
  }
  return rep;
}

}  // namespace pbc
