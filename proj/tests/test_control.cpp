#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "pbc/control.hpp"

using namespace pbc;

TEST_CASE("predicted-image blend") {
  MapModel ricker = MapModel::ricker(5.0);
  CHECK(std::abs(pbc_map(0.3, ricker, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(pbc_map(0.77, ricker, 1.0) - 1.0) < 1e-15);
  CHECK(pbc_map(1.0, ricker, 0.437) == 0.437);
  double expected = 0.8 * 0.3 + 0.2 * (0.3 * std::exp(3.5));
  CHECK(pbc_map(0.8, ricker, 0.3) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("scheme construction validates ranges") {
  CHECK_THROWS_AS(ControlScheme::deterministic(1.0), ConfigError);
  CHECK_THROWS_AS(ControlScheme::multiplicative(-0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(ControlScheme::multiplicative(0.5, -1.0), ConfigError);
  CHECK_THROWS_AS(ControlScheme::deterministic_iid(0.5, 1.5), ConfigError);
  CHECK_THROWS_AS(ControlScheme::deterministic_iid(0.9, 0.3), ConfigError);
}

TEST_CASE("fixed point is preserved exactly") {
  MapModel ricker = MapModel::ricker(5.0);
  MapModel logistic = MapModel::truncated_logistic(4.0);
  ControlScheme mult = ControlScheme::multiplicative(0.8, 0.02);
  ControlScheme det = ControlScheme::deterministic(0.61);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double xi = u(rng);
    CHECK(std::abs(step(ricker, mult, 1.0, xi).x - 1.0) <= 1e-14);
    CHECK(std::abs(step(ricker, det, 1.0, xi).x - 1.0) <= 1e-14);
    CHECK(std::abs(step(logistic, mult, 0.75, xi).x - 0.75) <= 1e-14);
    CHECK(!step(ricker, mult, 1.0, xi).clamped);
  }
}

TEST_CASE("additive shift at the fixed point") {
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme add = ControlScheme::additive(0.9, 0.02);
  StepResult s = step(ricker, add, 1.0, -1.0);
  CHECK(s.x == doctest::Approx(0.98).epsilon(1e-14));
  CHECK(!s.clamped);
}

TEST_CASE("zero intensity collapses the noisy schemes to the deterministic one") {
  MapModel ricker = MapModel::ricker(5.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(1e-6, 11.0);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  std::uniform_real_distribution<double> ua(0.0, 0.999);
  for (int i = 0; i < 100000; ++i) {
    double x = ux(rng), xi = uxi(rng), alpha = ua(rng);
    ControlScheme mult = ControlScheme::multiplicative(alpha, 0.0);
    ControlScheme add = ControlScheme::additive(alpha, 0.0);
    ControlScheme det = ControlScheme::deterministic(alpha);
    double a = step(ricker, mult, x, xi).x;
    double b = step(ricker, add, x, xi).x;
    double c = step(ricker, det, x, xi).x;
    REQUIRE(a == b);
    REQUIRE(a == c);
  }
}

TEST_CASE("map-multiplicative with zero intensity is the bare map") {
  MapModel singer = MapModel::singer();
  ControlScheme scheme = ControlScheme::map_multiplicative(0.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(1e-6, 1.4);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    double x = ux(rng);
    REQUIRE(step(singer, scheme, x, uxi(rng)).x == singer(x));
  }
}

TEST_CASE("admissible control values never clamp") {
  // alpha + l*nu < 1 and alpha - l > 0 keep the bracket a convex blend of
  // two nonnegative values.
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme mult = ControlScheme::multiplicative(0.8, 0.02);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(1e-9, 11.0);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  for (int i = 0; i < 1000000; ++i) {
    StepResult s = step(ricker, mult, ux(rng), uxi(rng));
    REQUIRE(s.x > 0.0);
    REQUIRE(!s.clamped);
  }
}

TEST_CASE("bracket identity cross-check") {
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme mult = ControlScheme::multiplicative(0.8, 0.02);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ux(1e-6, 11.0);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    double x = ux(rng), xi = uxi(rng);
    double fx = ricker(x);
    double rearranged = x + (1.0 - 0.8 - 0.02 * xi) * (fx - x);
    double got = step(ricker, mult, x, xi).x;
    REQUIRE(got == doctest::Approx(rearranged).epsilon(1e-12));
  }
}

TEST_CASE("iid control driver maps the perturbation onto [lo, hi)") {
  MapModel ricker = MapModel::ricker(5.0);
  ControlScheme det = ControlScheme::deterministic_iid(0.93, 0.99);
  // xi = -1 selects lo; xi -> 1 approaches hi.
  double x = 0.4;
  double fx = ricker(x);
  CHECK(step(ricker, det, x, -1.0).x == fx - 0.93 * (fx - x));
  double a_hi = 0.93 + (0.99 - 0.93) * (0.5 * (0.999999 + 1.0));
  CHECK(step(ricker, det, x, 0.999999).x == doctest::Approx(fx - a_hi * (fx - x)).epsilon(1e-12));
  CHECK(step(ricker, det, x, -1.0).realized_alpha == 0.93);
  CHECK(step(ricker, det, x, 0.0).realized_alpha == doctest::Approx(0.96).epsilon(1e-15));
}

TEST_CASE("clamping is recorded, not raised") {
  MapModel ricker = MapModel::ricker(5.0);
  // alpha + l*xi far above 1 drives the bracket negative for x below K.
  ControlScheme wild = ControlScheme::multiplicative(0.9, 10.0);
  StepResult s = step(ricker, wild, 0.3, 1.0);
  CHECK(s.x == 0.0);
  CHECK(s.clamped);
}
