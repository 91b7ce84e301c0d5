#include "pbc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pbc/analysis.hpp"
#include "pbc/numeric.hpp"

namespace pbc {
namespace {

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: key '" + key + "': cannot parse number '" + text + "'");
  }
  return v;
}

int64_t parse_int(const std::string& key, const std::string& text) {
  int64_t v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: key '" + key + "': cannot parse integer '" + text + "'");
  }
  return v;
}

uint64_t parse_u64(const std::string& key, const std::string& text) {
  uint64_t v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: key '" + key + "': cannot parse seed '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

GridSpec parse_grid(const std::string& key, const std::string& text) {
  std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) {
    throw ConfigError("config: key '" + key + "': grid syntax is lo:hi:step");
  }
  GridSpec g{parse_double(key, parts[0]), parse_double(key, parts[1]),
             parse_double(key, parts[2])};
  if (!(g.step > 0.0) || g.hi < g.lo) {
    throw ConfigError("config: key '" + key + "': grid needs step > 0 and hi >= lo");
  }
  return g;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(v[i]);
  }
  return out;
}

void apply_pair(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                bool allow_grids) {
  auto scalar_or_grid = [&](double& scalar, std::optional<GridSpec>& grid) {
    if (value.find(':') != std::string::npos) {
      if (!allow_grids) {
        throw ConfigError("config: key '" + key + "': grid values are only valid for scan");
      }
      grid = parse_grid(key, value);
      scalar = grid->lo;
    } else {
      scalar = parse_double(key, value);
      grid.reset();
    }
  };

  if (key == "map") {
    cfg.map = value;
  } else if (key == "r") {
    cfg.r = parse_double(key, value);
  } else if (key == "A") {
    cfg.A = parse_double(key, value);
  } else if (key == "B") {
    cfg.B = parse_double(key, value);
  } else if (key == "gamma_exp") {
    cfg.gamma_exp = parse_double(key, value);
  } else if (key == "poly") {
    cfg.poly = parse_double_list(key, value);
  } else if (key == "tail") {
    std::vector<double> t = parse_double_list(key, value);
    if (t.size() != 4) {
      throw ConfigError("config: key 'tail': expected x_break,num,den_a,den_b");
    }
    cfg.tail = RationalTail{t[0], t[1], t[2], t[3]};
  } else if (key == "scheme") {
    cfg.scheme = value;
  } else if (key == "alpha") {
    scalar_or_grid(cfg.alpha, cfg.alpha_grid);
  } else if (key == "l") {
    scalar_or_grid(cfg.l, cfg.l_grid);
  } else if (key == "alpha_seq") {
    cfg.alpha_seq = value;
  } else if (key == "noise") {
    cfg.noise = value;
  } else if (key == "nu") {
    cfg.nu = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "x0") {
    cfg.x0 = parse_double_list(key, value);
  } else if (key == "n_steps") {
    cfg.n_steps = parse_int(key, value);
  } else if (key == "n_traj") {
    cfg.n_traj = parse_int(key, value);
  } else if (key == "eps") {
    cfg.eps = parse_double(key, value);
  } else if (key == "eps1") {
    cfg.eps1 = parse_double(key, value);
  } else if (key == "lip_eps") {
    cfg.lip_eps = parse_double(key, value);
  } else if (key == "lip_grid") {
    cfg.lip_grid = parse_int(key, value);
  } else if (key == "lip_bound") {
    cfg.lip_bound = parse_double(key, value);
  } else if (key == "M") {
    cfg.M_override = parse_double(key, value);
  } else if (key == "M_eps") {
    cfg.M_eps_override = parse_double(key, value);
  } else if (key == "out_traj") {
    cfg.out_traj = value;
  } else if (key == "out_stats") {
    cfg.out_stats = value;
  } else if (key == "out_scan") {
    cfg.out_scan = value;
  } else if (key == "dump_max") {
    cfg.dump_max = parse_int(key, value);
  } else if (key == "audit") {
    cfg.audit = parse_int(key, value) != 0;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void validate(const ExperimentConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(cfg.map == "ricker" || cfg.map == "logistic" || cfg.map == "bh1" || cfg.map == "bh2" ||
              cfg.map == "singer" || cfg.map == "custom",
          "key 'map': unknown model '" + cfg.map + "'");
  require(cfg.scheme == "uncontrolled" || cfg.scheme == "det" || cfg.scheme == "mult" ||
              cfg.scheme == "add" || cfg.scheme == "mapmult",
          "key 'scheme': unknown scheme '" + cfg.scheme + "'");
  require(cfg.noise == "uniform" || cfg.noise == "skewed",
          "key 'noise': unknown law '" + cfg.noise + "'");
  if (!cfg.alpha_grid) {
    require(cfg.alpha >= 0.0 && cfg.alpha < 1.0, "key 'alpha': value out of [0, 1)");
  } else {
    require(cfg.alpha_grid->lo >= 0.0 && cfg.alpha_grid->hi <= 1.0,
            "key 'alpha': grid out of [0, 1]");
  }
  require(cfg.l >= 0.0, "key 'l': must be nonnegative");
  if (cfg.l_grid) require(cfg.l_grid->lo >= 0.0, "key 'l': grid must be nonnegative");
  require(cfg.nu >= 1.0, "key 'nu': must be at least 1");
  if (cfg.noise == "uniform") require(cfg.nu == 1.0, "key 'nu': uniform law fixes nu = 1");
  require(!cfg.x0.empty(), "key 'x0': need at least one value");
  for (double v : cfg.x0) require(v > 0.0, "key 'x0': values must be positive");
  require(cfg.n_steps >= 1, "key 'n_steps': must be at least 1");
  require(cfg.n_traj >= 1, "key 'n_traj': must be at least 1");
  require(cfg.eps > 0.0, "key 'eps': must be positive");
  if (cfg.eps1) require(*cfg.eps1 > 0.0, "key 'eps1': must be positive");
  require(cfg.lip_grid >= 1000, "key 'lip_grid': must be at least 1000");
  require(cfg.dump_max >= 0, "key 'dump_max': must be nonnegative");
  if (cfg.alpha_seq != "const") {
    std::vector<std::string> parts = split(cfg.alpha_seq, ':');
    require(parts.size() == 3 && parts[0] == "iid", "key 'alpha_seq': use const or iid:<lo>:<hi>");
  }
}

}  // namespace

std::vector<double> GridSpec::expand() const {
  // Inclusive endpoints: accumulated rounding within 1e-12 still counts as
  // hitting hi.
  std::vector<double> out;
  double slack = 1e-12 * std::max(1.0, std::abs(hi));
  for (double v = lo; v <= hi + slack; v += step) out.push_back(std::min(v, hi));
  return out;
}

ExperimentConfig parse_config(const std::string& file_text,
                              const std::vector<std::string>& overrides, bool allow_grids) {
  ExperimentConfig cfg;
  auto apply_line = [&](const std::string& raw) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') return;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key=value, got '" + line + "'");
    }
    apply_pair(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), allow_grids);
  };

  std::istringstream in(file_text);
  std::string line;
  while (std::getline(in, line)) apply_line(line);
  for (const std::string& token : overrides) apply_line(token);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides, bool allow_grids) {
  std::string text;
  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read file '" + *path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return parse_config(text, overrides, allow_grids);
}

std::vector<std::string> ExperimentConfig::resolved_lines() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + "=" + v); };
  add("map", map);
  if (map == "ricker" || map == "logistic") add("r", format_double(r));
  if (map == "bh1" || map == "bh2") {
    add("A", format_double(A));
    add("B", format_double(B));
    add("gamma_exp", format_double(gamma_exp));
  }
  if (map == "custom") {
    add("poly", join_doubles(poly));
    if (tail) {
      add("tail", join_doubles({tail->x_break, tail->num, tail->den_a, tail->den_b}));
    }
  }
  add("scheme", scheme);
  if (alpha_grid) {
    add("alpha", format_double(alpha_grid->lo) + ":" + format_double(alpha_grid->hi) + ":" +
                     format_double(alpha_grid->step));
  } else {
    add("alpha", format_double(alpha));
  }
  if (l_grid) {
    add("l", format_double(l_grid->lo) + ":" + format_double(l_grid->hi) + ":" +
                 format_double(l_grid->step));
  } else {
    add("l", format_double(l));
  }
  add("alpha_seq", alpha_seq);
  add("noise", noise);
  add("nu", format_double(nu));
  add("seed", format_int(static_cast<int64_t>(seed)));
  add("x0", join_doubles(x0));
  add("n_steps", format_int(n_steps));
  add("n_traj", format_int(n_traj));
  add("eps", format_double(eps));
  if (eps1) add("eps1", format_double(*eps1));
  if (lip_eps) add("lip_eps", format_double(*lip_eps));
  add("lip_grid", format_int(lip_grid));
  if (lip_bound) add("lip_bound", format_double(*lip_bound));
  if (M_override) add("M", format_double(*M_override));
  if (M_eps_override) add("M_eps", format_double(*M_eps_override));
  if (!out_traj.empty()) add("out_traj", out_traj);
  if (!out_stats.empty()) add("out_stats", out_stats);
  if (!out_scan.empty()) add("out_scan", out_scan);
  add("dump_max", format_int(dump_max));
  add("audit", audit ? "1" : "0");
  return out;
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg) {
  MapModel model = [&]() {
    if (cfg.map == "ricker") return MapModel::ricker(cfg.r);
    if (cfg.map == "logistic") return MapModel::truncated_logistic(cfg.r);
    if (cfg.map == "bh1") return MapModel::beverton_holt_1(cfg.A, cfg.B, cfg.gamma_exp);
    if (cfg.map == "bh2") return MapModel::beverton_holt_2(cfg.A, cfg.B, cfg.gamma_exp);
    if (cfg.map == "singer") return MapModel::singer();
    return MapModel::custom(cfg.poly, cfg.tail);
  }();

  // Scan grids may legitimately touch alpha = 1 (frozen state); the template
  // scheme is built with an interior value and overridden per cell.
  const double alpha0 = cfg.alpha_grid ? std::min(cfg.alpha, 0.5) : cfg.alpha;
  const double l0 = cfg.l_grid ? 0.0 : cfg.l;
  ControlScheme scheme = [&]() {
    if (cfg.scheme == "uncontrolled") return ControlScheme::uncontrolled();
    if (cfg.scheme == "det") {
      if (cfg.alpha_seq == "const") return ControlScheme::deterministic(alpha0);
      std::vector<std::string> parts = split(cfg.alpha_seq, ':');
      return ControlScheme::deterministic_iid(parse_double("alpha_seq", parts[1]),
                                              parse_double("alpha_seq", parts[2]));
    }
    if (cfg.scheme == "mult") return ControlScheme::multiplicative(alpha0, l0);
    if (cfg.scheme == "add") return ControlScheme::additive(alpha0, l0);
    return ControlScheme::map_multiplicative(l0);
  }();

  NoiseSpec noise = cfg.noise == "uniform" ? NoiseSpec::uniform(cfg.seed)
                                           : NoiseSpec::skewed(cfg.nu, cfg.seed);

  const double K = model.equilibrium();
  double lip_eps = cfg.lip_eps.value_or(0.06 * K);
  if (!(lip_eps > 0.0) || !(lip_eps < K)) {
    throw ConfigError("config: key 'lip_eps': must lie in (0, K)");
  }

  LipschitzData lip = certify_lipschitz(model, lip_eps, cfg.lip_grid, cfg.lip_bound);
  // Explicit constants take precedence over grid estimates and are treated
  // as certified (no inflation downstream).
  if (cfg.M_override) lip.M = *cfg.M_override;
  if (cfg.M_eps_override) lip.M_eps = *cfg.M_eps_override;
  if (!(lip.M >= lip.M_eps)) throw ConfigError("config: need M >= M_eps");

  EntryMarkers markers;
  markers.K = K;
  markers.eps = cfg.eps;
  if (model.has_critical_point()) {
    InvariantInterval iv = invariant_interval(model);
    markers.mu_valid = true;
    markers.mu1 = iv.mu1;
    markers.mu2 = iv.mu2;
  }

  EnsembleSpec spec;
  spec.x0 = cfg.x0;
  spec.n_steps = cfg.n_steps;
  spec.n_traj = cfg.n_traj;
  spec.eps = cfg.eps;
  spec.dump_max = cfg.dump_max;
  spec.audit = cfg.audit;

  std::optional<AuditParams> audit;
  if (cfg.audit) {
    LipschitzData checked = (cfg.M_override && cfg.M_eps_override) ? lip : lip.inflated();
    audit = make_audit_params(model, scheme, cfg.nu, checked);
  }

  return {std::move(model), scheme, noise, spec, markers, lip, audit, lip_eps};
}

namespace {

void write_lines(std::ostream& os, const std::vector<std::string>& header) {
  for (const std::string& line : header) os << "# " << line << "\n";
}

}  // namespace

void write_trajectory_csv(const std::string& path, const std::vector<std::string>& header,
                          const std::vector<Trajectory>& trajectories) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  write_lines(os, header);
  os << "traj,step,x\n";
  for (size_t t = 0; t < trajectories.size(); ++t) {
    const Trajectory& traj = trajectories[t];
    for (size_t n = 0; n < traj.values.size(); ++n) {
      os << format_int(static_cast<int64_t>(t)) << ',' << format_int(static_cast<int64_t>(n))
         << ',' << format_double(traj.values[n]) << '\n';
    }
  }
}

std::string render_stats_csv(const std::vector<std::string>& header, const EnsembleStats& stats) {
  std::ostringstream os;
  write_lines(os, header);
  os << "step,q05,q50,q95,frac_eps\n";
  for (size_t n = 0; n < stats.q05.size(); ++n) {
    os << format_int(static_cast<int64_t>(n)) << ',' << format_double(stats.q05[n]) << ','
       << format_double(stats.q50[n]) << ',' << format_double(stats.q95[n]) << ','
       << format_double(stats.frac_eps[n]) << '\n';
  }
  return os.str();
}

void write_stats_csv(const std::string& path, const std::vector<std::string>& header,
                     const EnsembleStats& stats) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  os << render_stats_csv(header, stats);
}

void write_scan_csv(const std::string& path, const std::vector<std::string>& header,
                    const ScanTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  write_lines(os, header);
  os << "alpha,l,frac,admissible\n";
  for (const ScanCell& cell : table.cells) {
    os << format_double(cell.alpha) << ',' << format_double(cell.l) << ','
       << format_double(cell.frac) << ',' << (cell.admissible ? '1' : '0') << '\n';
  }
}

}  // namespace pbc
