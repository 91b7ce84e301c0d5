#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "pbc/config.hpp"

using namespace pbc;

TEST_CASE("flag-only configuration") {
  ExperimentConfig cfg = parse_config(
      "", {"map=ricker", "r=5", "alpha=0.8", "l=0.02", "nu=1", "noise=uniform", "x0=0.3"});
  CHECK(cfg.map == "ricker");
  CHECK(cfg.r == 5.0);
  CHECK(cfg.alpha == 0.8);
  CHECK(cfg.l == 0.02);
  CHECK(cfg.nu == 1.0);
  CHECK(cfg.noise == "uniform");
  CHECK(cfg.x0 == std::vector<double>{0.3});
  CHECK(cfg.seed == NoiseSpec::kDefaultSeed);  // fixed default, never time based
}

TEST_CASE("file lines and flag overrides agree with the flag-only form") {
  std::string file =
      "# an experiment\n"
      "map=ricker\n"
      "r=5\n"
      "alpha=0.5\n"
      "\n"
      "l=0.02\n";
  ExperimentConfig from_file = parse_config(file, {"alpha=0.8"});
  ExperimentConfig from_flags = parse_config("", {"map=ricker", "r=5", "alpha=0.8", "l=0.02"});
  CHECK(from_file.resolved_lines() == from_flags.resolved_lines());
  CHECK(from_file.alpha == 0.8);  // flags win over the file
}

TEST_CASE("resolved lines round-trip to the identical configuration") {
  ExperimentConfig cfg = parse_config(
      "", {"map=singer", "scheme=mapmult", "l=0.03", "x0=0.3217", "n_traj=10", "n_steps=5000",
           "eps=0.01", "seed=777", "out_stats=stats.csv"});
  std::vector<std::string> lines = cfg.resolved_lines();
  std::string text;
  for (const std::string& line : lines) text += line + "\n";
  ExperimentConfig again = parse_config(text, {});
  CHECK(again.resolved_lines() == lines);
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_WITH_AS(parse_config("", {"alpha=1.5"}), doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"frobnicate=1"}), doctest::Contains("frobnicate"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("", {"l=zero"}), doctest::Contains("l"), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"l=0.5extra"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"nu=0.5"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"noise=uniform", "nu=5"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"n_steps=0"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"x0=-1"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"x0=0.3,0"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"map=nosuchmap"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"scheme=nosuchscheme"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"alpha_seq=sometimes"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"lip_grid=10"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"justakey"}), ConfigError);
}

TEST_CASE("grids are scan-only") {
  CHECK_THROWS_AS(parse_config("", {"alpha=0.1:0.9:0.1"}, /*allow_grids=*/false), ConfigError);
  ExperimentConfig cfg = parse_config("", {"alpha=0.1:0.95:0.05"}, /*allow_grids=*/true);
  REQUIRE(cfg.alpha_grid.has_value());
  std::vector<double> grid = cfg.alpha_grid->expand();
  REQUIRE(grid.size() == 18);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 0.95);  // inclusive within 1e-12

  ExperimentConfig quarters = parse_config("", {"l=0:1:0.25"}, true);
  CHECK(quarters.l_grid->expand() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("alpha sequences") {
  ExperimentConfig cfg =
      parse_config("", {"scheme=det", "alpha_seq=iid:0.93:0.99", "map=ricker", "r=5"});
  ResolvedExperiment exp = resolve_experiment(cfg);
  CHECK(exp.scheme.kind == SchemeKind::deterministic_pbc);
  CHECK(exp.scheme.seq == AlphaSequence::iid_uniform);
  CHECK(exp.scheme.seq_lo == 0.93);
  CHECK(exp.scheme.seq_hi == 0.99);
}

TEST_CASE("resolution wires the experiment together") {
  ExperimentConfig cfg = parse_config(
      "", {"map=ricker", "r=5", "alpha=0.8", "l=0.02", "x0=0.3", "eps=1e-6"});
  ResolvedExperiment exp = resolve_experiment(cfg);
  CHECK(exp.model.equilibrium() == 1.0);
  CHECK(exp.markers.mu_valid);
  CHECK(exp.markers.eps == 1e-6);
  CHECK(exp.lipschitz.M == doctest::Approx(12.8624).epsilon(1e-3));
  CHECK(exp.lipschitz.M_eps == doctest::Approx(4.4811).epsilon(1e-3));
  REQUIRE(exp.audit.has_value());
  CHECK(exp.audit->ball_active);

  // Explicit constants replace the estimates.
  ExperimentConfig pinned = parse_config(
      "", {"map=ricker", "r=5", "alpha=0.8", "l=0.02", "M=12.87", "M_eps=4.5"});
  CHECK(resolve_experiment(pinned).lipschitz.M == 12.87);
  CHECK(resolve_experiment(pinned).lipschitz.M_eps == 4.5);
}
