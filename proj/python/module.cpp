#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "pbc/analysis.hpp"
#include "pbc/config.hpp"
#include "pbc/control.hpp"
#include "pbc/maps.hpp"
#include "pbc/noise.hpp"
#include "pbc/simulate.hpp"

namespace py = pybind11;
using namespace pbc;

namespace {

py::dict clause_dict(const Clause& c) {
  py::dict d;
  d["name"] = c.name;
  d["pass"] = c.pass;
  d["margin"] = c.margin;
  return d;
}

py::dict report_dict(const AdmissibilityReport& rep) {
  py::dict out;
  py::list crits;
  for (const CriterionReport& r : rep.criteria) {
    py::dict d;
    d["key"] = r.key;
    d["applicable"] = r.applicable;
    py::list cl;
    for (const Clause& c : r.clauses) cl.append(clause_dict(c));
    d["clauses"] = cl;
    if (r.l_interval && !r.l_interval->empty()) {
      d["l_interval"] = py::make_tuple(r.l_interval->lo, r.l_interval->hi);
    } else {
      d["l_interval"] = py::none();
    }
    d["all_pass"] = r.all_pass();
    crits.append(d);
  }
  out["criteria"] = crits;
  if (rep.widest_interval && !rep.widest_interval->empty()) {
    out["l_interval"] = py::make_tuple(rep.widest_interval->lo, rep.widest_interval->hi);
  } else {
    out["l_interval"] = py::none();
  }
  out["any_fail"] = rep.any_fail();
  return out;
}

}  // namespace

PYBIND11_MODULE(_pbcsim, m) {
  m.doc() = "Simulation and analysis of difference equations under noisy prediction-based control";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AssumptionError>(m, "AssumptionError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);

  py::class_<MapModel>(m, "MapModel")
      .def_static("ricker", &MapModel::ricker, py::arg("r"))
      .def_static("truncated_logistic", &MapModel::truncated_logistic, py::arg("r"))
      .def_static("beverton_holt_1", &MapModel::beverton_holt_1, py::arg("A"), py::arg("B"),
                  py::arg("gamma"))
      .def_static("beverton_holt_2", &MapModel::beverton_holt_2, py::arg("A"), py::arg("B"),
                  py::arg("gamma"))
      .def_static("singer", &MapModel::singer)
      .def("__call__", &MapModel::operator(), py::arg("x"))
      .def_property_readonly("equilibrium", &MapModel::equilibrium)
      .def_property_readonly("has_critical_point", &MapModel::has_critical_point)
      .def_property_readonly("critical_point", &MapModel::critical_point)
      .def_property_readonly("domain_bound", &MapModel::domain_bound)
      .def("__repr__", &MapModel::describe);

  m.def(
      "estimate_global_lipschitz",
      [](const MapModel& model, double bound, int64_t grid) {
        LipschitzEstimate e = estimate_global_lipschitz(model, bound, grid);
        return py::make_tuple(e.value, e.tolerance);
      },
      py::arg("model"), py::arg("search_bound"), py::arg("grid_size") = 200000);
  m.def(
      "estimate_local_lipschitz",
      [](const MapModel& model, double eps, int64_t grid) {
        LipschitzEstimate e = estimate_local_lipschitz(model, eps, grid);
        return py::make_tuple(e.value, e.tolerance);
      },
      py::arg("model"), py::arg("eps"), py::arg("grid_size") = 200000);

  m.def(
      "verify_assumptions",
      [](const MapModel& model, int64_t grid) {
        AssumptionReport rep = verify_assumptions(model, grid);
        auto clause = [](const AssumptionClause& c) {
          py::dict d;
          d["pass"] = c.pass;
          d["counterexample"] = c.counterexample ? py::cast(*c.counterexample) : py::none();
          return d;
        };
        py::dict d;
        d["positivity"] = clause(rep.positivity);
        d["growth_below_equilibrium"] = clause(rep.growth_below_equilibrium);
        d["decay_above_equilibrium"] = clause(rep.decay_above_equilibrium);
        d["monotone_tail"] = clause(rep.monotone_tail);
        d["all"] = rep.all();
        return d;
      },
      py::arg("model"), py::arg("grid_size") = 10000);

  m.def(
      "invariant_interval",
      [](const MapModel& model) {
        InvariantInterval iv = invariant_interval(model);
        return py::make_tuple(iv.mu1, iv.mu2);
      },
      py::arg("model"));

  m.def(
      "contraction_rate",
      [](double alpha, double l, double nu, const std::string& mode) {
        RateMode rm = RateMode::multiplicative;
        if (mode == "additive") {
          rm = RateMode::additive;
        } else if (mode == "det") {
          rm = RateMode::det_variable;
        } else if (mode != "multiplicative") {
          throw ConfigError("mode must be det, multiplicative or additive");
        }
        Rate rate = contraction_rate(alpha, l, nu, rm);
        return py::make_tuple(rate.gamma, rate.contracts);
      },
      py::arg("alpha"), py::arg("l") = 0.0, py::arg("nu") = 1.0,
      py::arg("mode") = "multiplicative");

  m.def("blur_radius", &blur_radius, py::arg("alpha"), py::arg("l"));
  m.def("max_additive_noise", &max_additive_noise, py::arg("alpha"), py::arg("model"),
        py::arg("target_half_width"));

  m.def(
      "hitting_constants",
      [](const MapModel& model, double alpha, double l, double nu, double eps, double M,
         double M_eps, bool force) {
        HittingConstants hc = hitting_constants(model, {M, M_eps, eps, 0}, alpha, l, nu, eps,
                                                force);
        py::dict d;
        d["d1"] = hc.d1;
        d["N1"] = hc.N1;
        d["N2"] = hc.N2;
        d["a1"] = hc.a1;
        d["delta"] = hc.delta;
        d["gamma"] = hc.gamma;
        d["r"] = hc.r_escape;
        d["hypotheses_ok"] = hc.hypotheses_ok;
        py::list cl;
        for (const Clause& c : hc.hypothesis_clauses) cl.append(clause_dict(c));
        d["hypothesis_clauses"] = cl;
        return d;
      },
      py::arg("model"), py::arg("alpha"), py::arg("l"), py::arg("nu"), py::arg("eps"),
      py::arg("M"), py::arg("M_eps"), py::arg("force") = false);

  m.def(
      "parameter_scan",
      [](const MapModel& model, const ControlScheme& scheme, const NoiseSpec& noise,
         const std::vector<double>& alphas, const std::vector<double>& ls, int64_t n_traj,
         int64_t n_steps, double eps, double M, double M_eps, double lip_eps, double x0) {
        ScanTable t = parameter_scan(model, scheme, noise, alphas, ls, n_traj, n_steps, eps,
                                     {M, M_eps, lip_eps, 0}, 0, x0);
        py::list rows;
        for (const ScanCell& c : t.cells) {
          rows.append(py::make_tuple(c.alpha, c.l, c.frac, c.admissible));
        }
        return rows;
      },
      py::arg("model"), py::arg("scheme"), py::arg("noise"), py::arg("alphas"), py::arg("ls"),
      py::arg("n_traj"), py::arg("n_steps"), py::arg("eps"), py::arg("M"), py::arg("M_eps"),
      py::arg("lip_eps"), py::arg("x0") = 0.3);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def_static("uniform", &NoiseSpec::uniform, py::arg("seed") = NoiseSpec::kDefaultSeed)
      .def_static("skewed", &NoiseSpec::skewed, py::arg("nu"),
                  py::arg("seed") = NoiseSpec::kDefaultSeed)
      .def_readonly("nu", &NoiseSpec::nu)
      .def_readonly("base_seed", &NoiseSpec::base_seed);

  m.def(
      "samples",
      [](const NoiseSpec& spec, uint64_t trajectory_index, int64_t count) {
        SampleStream stream = derive_stream(spec, trajectory_index);
        std::vector<double> out(static_cast<size_t>(count));
        for (int64_t i = 0; i < count; ++i) out[i] = stream.at(static_cast<uint64_t>(i));
        return out;
      },
      py::arg("spec"), py::arg("trajectory_index"), py::arg("count"));

  py::class_<ControlScheme>(m, "ControlScheme")
      .def_static("uncontrolled", &ControlScheme::uncontrolled)
      .def_static("deterministic", &ControlScheme::deterministic, py::arg("alpha"))
      .def_static("deterministic_iid", &ControlScheme::deterministic_iid, py::arg("lo"),
                  py::arg("hi"))
      .def_static("multiplicative", &ControlScheme::multiplicative, py::arg("alpha"), py::arg("l"))
      .def_static("additive", &ControlScheme::additive, py::arg("alpha"), py::arg("l"))
      .def_static("map_multiplicative", &ControlScheme::map_multiplicative, py::arg("l"));

  m.def("pbc_map", &pbc_map, py::arg("alpha"), py::arg("model"), py::arg("x"));
  m.def(
      "step",
      [](const MapModel& model, const ControlScheme& scheme, double x, double xi) {
        StepResult s = step(model, scheme, x, xi);
        return py::make_tuple(s.x, s.clamped);
      },
      py::arg("model"), py::arg("scheme"), py::arg("x"), py::arg("xi"));

  m.def(
      "run_trajectory",
      [](const MapModel& model, const ControlScheme& scheme, const NoiseSpec& noise, double x0,
         int64_t n_steps, uint32_t index) {
        Trajectory t = run_trajectory(model, scheme, noise, x0, n_steps, index);
        py::dict d;
        d["values"] = t.values;
        d["clamp_events"] = t.clamp_events;
        d["extinct"] = t.extinct;
        d["diverged"] = t.diverged;
        return d;
      },
      py::arg("model"), py::arg("scheme"), py::arg("noise"), py::arg("x0"), py::arg("n_steps"),
      py::arg("index") = 0);

  m.def(
      "admissible_multiplicative",
      [](double alpha, double l, double M, double M_eps, double eps, double nu) {
        return report_dict(admissible_multiplicative(alpha, l, {M, M_eps, eps, 0}, nu));
      },
      py::arg("alpha"), py::arg("l"), py::arg("M"), py::arg("M_eps"), py::arg("eps"),
      py::arg("nu") = 1.0);
  m.def(
      "admissible_additive",
      [](double alpha, double l, const MapModel& model, double M,
         std::optional<double> target_width) {
        return report_dict(admissible_additive(alpha, l, model, {M, M, 0.0, 0}, target_width));
      },
      py::arg("alpha"), py::arg("l"), py::arg("model"), py::arg("M"),
      py::arg("target_width") = py::none());

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::vector<std::string>& overrides) {
        ExperimentConfig cfg = parse_config(config_text, overrides);
        ResolvedExperiment exp = resolve_experiment(cfg);
        EnsembleResult res = run_ensemble(exp.model, exp.scheme, exp.noise, exp.ensemble,
                                          exp.markers, exp.audit ? &*exp.audit : nullptr);
        const EnsembleStats& st = res.stats;
        py::dict d;
        d["n_traj"] = st.n_traj;
        d["n_steps"] = st.n_steps;
        d["q05"] = st.q05;
        d["q50"] = st.q50;
        d["q95"] = st.q95;
        d["frac_eps"] = st.frac_eps;
        d["convergence_fraction"] = st.convergence_fraction();
        d["clamp_events"] = st.clamp_total;
        d["extinct"] = st.extinct_count;
        d["diverged"] = st.diverged_count;
        d["violations"] = py::make_tuple(st.violations_a, st.violations_b, st.violations_c,
                                         st.violations_d);
        d["stats_csv"] = render_stats_csv(cfg.resolved_lines(), st);
        return d;
      },
      py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{});
}
