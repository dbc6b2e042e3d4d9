#include "pmelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pmelab/degiorgi.hpp"
#include "pmelab/error.hpp"
#include "pmelab/field_io.hpp"
#include "pmelab/geometry.hpp"
#include "pmelab/norms.hpp"
#include "pmelab/random.hpp"
#include "pmelab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pmelab {

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& msg) {
  fail(Errc::config_error, path + ": " + msg);
}

const json* member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) config_fail(path, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
  const json* v = member(obj, path, key);
  if (!v) {
    if (fallback) return *fallback;
    config_fail(path + "." + key, "required");
  }
  if (!v->is_number()) config_fail(path + "." + key, "expected a number");
  return v->get<double>();
}

int integer(const json& obj, const std::string& path, const char* key, std::optional<int> fallback = {}) {
  const json* v = member(obj, path, key);
  if (!v) {
    if (fallback) return *fallback;
    config_fail(path + "." + key, "required");
  }
  if (!v->is_number_integer()) config_fail(path + "." + key, "expected an integer");
  return v->get<int>();
}

std::string string(const json& obj, const std::string& path, const char* key, std::optional<std::string> fallback = {}) {
  const json* v = member(obj, path, key);
  if (!v) {
    if (fallback) return *fallback;
    config_fail(path + "." + key, "required");
  }
  if (!v->is_string()) config_fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

Point point(const json& v, const std::string& path, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    config_fail(path, "expected an array of " + std::to_string(n) + " numbers");
  Point p{0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    if (!v[a].is_number()) config_fail(path + "[" + std::to_string(a) + "]", "expected a number");
    p[a] = v[a].get<double>();
  }
  return p;
}

FieldSource field_source(const json& v, const std::string& path, const fs::path& base) {
  FieldSource s;
  if (v.is_string() || v.is_number()) {
    const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    try {
      s.expr = Expr::parse(text);
    } catch (const Error& e) {
      config_fail(path, e.what());
    }
    return s;
  }
  if (v.is_object()) {
    if (const json* e = member(v, path, "expr")) return field_source(*e, path + ".expr", base);
    if (member(v, path, "csv")) {
      fs::path p = string(v, path, "csv");
      if (p.is_relative()) p = base / p;
      if (!fs::exists(p)) config_fail(path + ".csv", "file not found: " + p.string());
      s.csv = p;
      return s;
    }
  }
  config_fail(path, "expected an expression string or an object with \"expr\" or \"csv\"");
}

Grid parse_grid(const json& j) {
  const std::string path = "grid";
  const int n = integer(j, path, "n", 1);
  if (n != 1 && n != 2) config_fail(path + ".n", "dimension must be 1 or 2");
  const json* ext = member(j, path, "extents");
  const json* nx = member(j, path, "nx");
  if (!ext || !ext->is_array() || static_cast<int>(ext->size()) != n)
    config_fail(path + ".extents", "expected " + std::to_string(n) + " [lo, hi] pairs");
  if (!nx || !nx->is_array() || static_cast<int>(nx->size()) != n)
    config_fail(path + ".nx", "expected " + std::to_string(n) + " cell counts");
  std::vector<Interval> extents;
  std::vector<int> counts;
  for (int a = 0; a < n; ++a) {
    const std::string ep = path + ".extents[" + std::to_string(a) + "]";
    const json& e = (*ext)[a];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      config_fail(ep, "expected [lo, hi]");
    extents.push_back({e[0].get<double>(), e[1].get<double>()});
    if (!((*nx)[a].is_number_integer()))
      config_fail(path + ".nx[" + std::to_string(a) + "]", "expected an integer");
    counts.push_back((*nx)[a].get<int>());
  }
  try {
    return make_grid(n, extents, counts, number(j, path, "t0"), number(j, path, "t1"),
                     integer(j, path, "nt"));
  } catch (const Error& e) {
    config_fail(path, e.what());
  }
}

void check_anchor_margin(const ExperimentConfig& c, const Anchor& a, const std::string& path) {
  const Grid& g = c.grid;
  for (int ax = 0; ax < g.n; ++ax) {
    const double lo = a.x0[ax] - g.extents[ax].lo;
    const double hi = g.extents[ax].hi - a.x0[ax];
    if (std::min(lo, hi) < 2.0 * c.rho0) {
      std::ostringstream os;
      os << "anchor lies " << std::min(lo, hi) << " from the boundary along axis " << ax
         << "; analysis cylinders need a margin of 2 rho0 = " << 2.0 * c.rho0;
      config_fail(path + ".x0", os.str());
    }
  }
  if (!(a.t0 > g.t0 && a.t0 <= g.t1)) config_fail(path + ".t0", "anchor time must lie in (grid.t0, grid.t1]");
}

Field sample_source(const FieldSource& s, const Grid& grid, const std::string& name) {
  if (s.expr) {
    const Expr& e = *s.expr;
    return sample_field(grid, [&](double t, const Point& x) { return e(t, x[0], x[1]); }, name);
  }
  Field f = read_field_csv(*s.csv);
  if (!(f.grid() == grid)) fail(Errc::config_error, s.csv->string() + ": grid does not match the run grid");
  f.set_name(name);
  return f;
}

std::vector<double> initial_slice(const ExperimentConfig& c) {
  const Grid& g = c.grid;
  if (c.scenario == Scenario::barenblatt) {
    const Barenblatt b(c.barenblatt);
    std::vector<double> u(g.cells());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = b(g.t0, g.point(i));
    return u;
  }
  if (c.initial.expr) {
    std::vector<double> u(g.cells());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = g.point(i);
      u[i] = (*c.initial.expr)(g.t0, x[0], x[1]);
      if (!std::isfinite(u[i]) || u[i] < 0.0)
        fail(Errc::config_error, "initial.expr: value " + format_double(u[i]) + " at cell " +
                                     std::to_string(i) + " is not a finite nonnegative number");
    }
    return u;
  }
  const Field f = read_field_csv(*c.initial.csv);
  Grid spatial = f.grid();
  spatial.t0 = g.t0;
  spatial.t1 = g.t1;
  spatial.nt = g.nt;
  if (!(spatial == g)) fail(Errc::config_error, "initial.csv: spatial grid does not match the run grid");
  const auto s = f.slice(0);
  return {s.begin(), s.end()};
}

ForcingPair build_forcing(const ExperimentConfig& c) {
  ForcingPair fp;
  for (std::size_t a = 0; a < c.forcing_f.size(); ++a)
    fp.f.push_back(sample_source(c.forcing_f[a], c.grid, "f" + std::to_string(a)));
  if (c.forcing_g) fp.g = sample_source(*c.forcing_g, c.grid, "g");
  return fp;
}

double history_needed(const ExperimentConfig& c, double M) {
  return c.rho0 * c.rho0 / std::pow(M, 1.0 - 1.0 / c.solver.m);
}

std::vector<Anchor> resolve_anchors(const ExperimentConfig& c, const Field& a, Rng& rng) {
  std::vector<Anchor> out = c.anchors;
  const Grid& g = c.grid;
  const double M = a.max();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].t0 - history_needed(c, M) < g.t0 - 1e-12)
      fail(Errc::config_error, "analysis.anchors[" + std::to_string(i) +
                                   "].t0: insufficient history for the first cylinder (needs " +
                                   format_double(history_needed(c, M)) + ")");
  const double earliest = g.t0 + history_needed(c, M);
  if (c.random_anchors > 0 && earliest > g.t1)
    fail(Errc::config_error, "analysis.random_anchors: the run is too short for any first cylinder");
  for (int r = 0; r < c.random_anchors; ++r) {
    Anchor an;
    an.t0 = g.time(std::max(g.nearest_slice(rng.uniform(earliest, g.t1)), 0));
    if (an.t0 < earliest) an.t0 = g.t1;
    for (int ax = 0; ax < g.n; ++ax)
      an.x0[ax] = rng.uniform(g.extents[ax].lo + 2.0 * c.rho0, g.extents[ax].hi - 2.0 * c.rho0);
    out.push_back(an);
  }
  return out;
}

json anchor_json(const Anchor& a, int n) {
  json x = json::array();
  for (int ax = 0; ax < n; ++ax) x.push_back(a.x0[ax]);
  return {{"t0", a.t0}, {"x0", x}};
}

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base) {
  if (!j.is_object()) config_fail("$", "config must be a JSON object");
  ExperimentConfig c;

  const std::string scen = string(j, "$", "scenario");
  if (scen == "barenblatt")
    c.scenario = Scenario::barenblatt;
  else if (scen == "custom-initial")
    c.scenario = Scenario::custom_initial;
  else if (scen == "forced")
    c.scenario = Scenario::forced;
  else
    config_fail("scenario", "expected barenblatt, custom-initial or forced");

  const json* grid = member(j, "$", "grid");
  if (!grid) config_fail("grid", "required");
  c.grid = parse_grid(*grid);
  const int n = c.grid.n;

  if (const json* s = member(j, "$", "solver")) {
    c.solver.m = number(*s, "solver", "m", 2.0);
    if (!(c.solver.m > 1.0)) config_fail("solver.m", "must exceed 1");
    const std::string b = string(*s, "solver", "boundary", "zero_flux");
    if (b == "zero_flux")
      c.solver.boundary = Boundary::zero_flux;
    else if (b == "periodic")
      c.solver.boundary = Boundary::periodic;
    else
      config_fail("solver.boundary", "expected zero_flux or periodic");
    c.solver.cfl_safety = number(*s, "solver", "cfl_safety", 0.9);
    if (!(c.solver.cfl_safety > 0.0 && c.solver.cfl_safety <= 1.0))
      config_fail("solver.cfl_safety", "must lie in (0, 1]");
    const double steps = number(*s, "solver", "max_steps", 5e7);
    if (!(steps >= 1.0)) config_fail("solver.max_steps", "must be positive");
    c.solver.max_steps = static_cast<std::size_t>(steps);
  }

  const json* init = member(j, "$", "initial");
  if (c.scenario == Scenario::barenblatt) {
    c.barenblatt.m = c.solver.m;
    c.barenblatt.n = n;
    if (init) {
      c.barenblatt.mass = number(*init, "initial", "mass", 1.0);
      if (const json* ctr = member(*init, "initial", "center")) c.barenblatt.center = point(*ctr, "initial.center", n);
    }
    if (!(c.barenblatt.mass > 0.0)) config_fail("initial.mass", "must be positive");
    if (!(c.grid.t0 > 0.0)) config_fail("grid.t0", "the Barenblatt scenario needs t0 > 0");
  } else {
    if (!init) config_fail("initial", "required for scenario " + scen);
    c.initial = field_source(*init, "initial", base);
  }

  if (const json* f = member(j, "$", "forcing")) {
    if (const json* fv = member(*f, "forcing", "f")) {
      if (!fv->is_array() || static_cast<int>(fv->size()) != n)
        config_fail("forcing.f", "expected " + std::to_string(n) + " components");
      for (int a = 0; a < n; ++a)
        c.forcing_f.push_back(field_source((*fv)[a], "forcing.f[" + std::to_string(a) + "]", base));
    }
    if (const json* gv = member(*f, "forcing", "g")) c.forcing_g = field_source(*gv, "forcing.g", base);
  }
  const bool forced = !c.forcing_f.empty() || c.forcing_g.has_value();
  if (c.scenario == Scenario::forced && !forced) config_fail("forcing", "the forced scenario needs f or g");
  if (c.scenario == Scenario::barenblatt && forced)
    config_fail("forcing", "the Barenblatt scenario is unforced");

  const json empty = json::object();
  const json* an = member(j, "$", "analysis");
  const json& a = an ? *an : empty;
  c.rho0 = number(a, "analysis", "rho0", 0.5);
  if (!(c.rho0 > 0.0)) config_fail("analysis.rho0", "must be positive");
  c.cascade.theta0 = number(a, "analysis", "theta0", 0.5);
  c.cascade.eta0 = number(a, "analysis", "eta0", 0.25);
  c.cascade.delta0 = number(a, "analysis", "delta0", 0.5);
  c.cascade.max_levels = integer(a, "analysis", "max_levels", 12);
  try {
    c.cascade.validate();
  } catch (const Error& e) {
    config_fail("analysis", e.what());
  }
  c.p = number(a, "analysis", "p", 8.0);
  c.q = number(a, "analysis", "q", 8.0);
  try {
    derive_exponents(c.p, c.q, n);
  } catch (const Error& e) {
    std::string msg = e.what();
    msg.erase(0, to_string(e.code()).size() + 2);
    fail(e.code(), "analysis.p/analysis.q: " + msg);
  }
  const std::string var = string(a, "analysis", "variable", "u");
  if (var != "u" && var != "um") config_fail("analysis.variable", "expected u or um");
  c.analyze_um = var == "um";
  c.caccioppoli_draws = integer(a, "analysis", "caccioppoli_draws", 8);
  if (c.caccioppoli_draws < 0) config_fail("analysis.caccioppoli_draws", "must be >= 0");
  c.random_anchors = integer(a, "analysis", "random_anchors", 0);
  if (c.random_anchors < 0) config_fail("analysis.random_anchors", "must be >= 0");
  c.oracle_tolerance = number(a, "analysis", "oracle_tolerance", 0.05);
  if (const json* list = member(a, "analysis", "anchors")) {
    if (!list->is_array()) config_fail("analysis.anchors", "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string path = "analysis.anchors[" + std::to_string(i) + "]";
      const json& e = (*list)[i];
      Anchor anc;
      anc.t0 = number(e, path, "t0", c.grid.t1);
      const json* x = member(e, path, "x0");
      if (!x) config_fail(path + ".x0", "required");
      anc.x0 = point(*x, path + ".x0", n);
      check_anchor_margin(c, anc, path);
      c.anchors.push_back(anc);
    }
  }
  if (c.anchors.empty() && c.random_anchors == 0)
    config_fail("analysis.anchors", "give at least one anchor or set random_anchors");

  if (const json* o = member(j, "$", "output")) {
    c.output_dir = string(*o, "output", "dir", "pmelab_out");
    c.checkpoint_stride = integer(*o, "output", "checkpoint_stride", 10);
    if (c.checkpoint_stride < 1) config_fail("output.checkpoint_stride", "must be >= 1");
  }
  if (const json* s = member(j, "$", "seed")) {
    if (!s->is_number_unsigned()) config_fail("seed", "expected a nonnegative integer");
    c.seed = s->get<std::uint64_t>();
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = read_json(path);
  } catch (const json::exception& e) {
    fail(Errc::config_error, path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

bool RunSummary::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RunSummary run_experiment(const ExperimentConfig& c, std::ostream* log) {
  RunSummary summary;
  summary.output_dir = c.output_dir;
  fs::create_directories(c.output_dir);
  auto note = [&](const std::string& s) {
    if (log) *log << s << '\n';
  };
  auto check = [&](std::string name, bool pass, std::string detail = {}) {
    note((pass ? "PASS " : "FAIL ") + name + (detail.empty() ? "" : "  " + detail));
    summary.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  const Grid& g = c.grid;
  const ForcingPair forcing = build_forcing(c);
  const auto u0 = initial_slice(c);

  note("solving on " + std::to_string(g.cells()) + " cells, " + std::to_string(g.nt) + " output steps");
  EvolveResult res;
  try {
    res = evolve(g, u0, forcing, c.solver);
  } catch (const Error& e) {
    fail(e.code(), std::string("solver: ") + e.what());
  }
  const Field& u = res.u;
  write_checkpoint(u, c.output_dir / "checkpoints", "u", c.checkpoint_stride);

  json norms = {{"solver",
                 {{"steps", res.steps},
                  {"min_value", res.min_value},
                  {"initial_mass", res.initial_mass},
                  {"final_mass", res.final_mass}}}};
  check("solver.nonnegative", res.min_value >= -tol_neg, "min " + format_double(res.min_value));
  if (forcing.empty()) {
    const double drift = std::abs(res.final_mass - res.initial_mass) / std::max(res.initial_mass, 1e-300);
    norms["solver"]["relative_mass_drift"] = drift;
    check("solver.mass", drift <= 1e-10, "drift " + format_double(drift));
  }
  if (c.scenario == Scenario::barenblatt) {
    const Field exact = barenblatt_field(g, c.barenblatt);
    double err = 0.0;
    for (int k = 0; k < g.slices(); ++k)
      for (std::size_t i = 0; i < g.cells(); ++i) err = std::max(err, std::abs(u(k, i) - exact(k, i)));
    const double rel = err / Barenblatt(c.barenblatt).max_at(g.t1);
    norms["oracle"] = {{"linf_error", err}, {"relative_error", rel}, {"tolerance", c.oracle_tolerance}};
    check("oracle.barenblatt", rel <= c.oracle_tolerance, "relative error " + format_double(rel));
  }

  const Field a = c.analyze_um ? pow_transform(u, c.solver.m) : u;
  const Field w = pow_transform(u, c.solver.m);
  const ExponentSet exps = derive_exponents(c.p, c.q, g.n);
  Rng rng(c.seed);
  const auto anchors = resolve_anchors(c, a, rng);

  json fits = json::array();
  json verification = json::array();
  json anchor_norms = json::array();
  std::optional<double> sigma_min;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const std::string tag = "anchor[" + std::to_string(i) + "]";
    const Anchor& an = anchors[i];
    const CascadeState st =
        oscillation_cascade(a, c.solver.m, an.t0, an.x0, c.rho0, c.cascade, exps, forcing);
    write_json(to_json(st), c.output_dir / ("cascade_" + std::to_string(i) + ".json"));
    write_text(cascade_csv(st), c.output_dir / ("cascade_" + std::to_string(i) + ".csv"));
    anchor_norms.push_back({{"anchor", anchor_json(an, g.n)}, {"forcing", to_json(st.norms0)}});
    check(tag + ".cascade.osc", st.osc_violations() == 0,
          std::to_string(st.levels.size()) + " levels, " + std::to_string(st.osc_violations()) + " violations");
    check(tag + ".cascade.nesting", st.nesting_violations() == 0,
          std::to_string(st.nesting_violations()) + " violations");

    json fit = {{"anchor", anchor_json(an, g.n)}};
    try {
      const HolderFit hf = holder_fit(st);
      fit.update(to_json(hf));
      if (!hf.flat) sigma_min = sigma_min ? std::min(*sigma_min, hf.sigma) : hf.sigma;
      note("     " + tag + ".holder_fit  " + (hf.flat ? std::string("flat") : "sigma " + format_double(hf.sigma)));
    } catch (const Error& e) {
      if (e.code() != Errc::insufficient_data) throw;
      fit["sigma"] = nullptr;
      fit["error"] = e.what();
      // Too few resolvable levels is a property of the grid, not a failed check.
      note("     " + tag + ".holder_fit  skipped: " + e.what());
    }
    fits.push_back(fit);

    // Energy inequalities on random cylinders and levels around the anchor,
    // applied to the equation variable u^m.
    const double wmax = w.max();
    int finite = 0;
    int drawn = 0;
    for (int d = 0; d < c.caccioppoli_draws; ++d) {
      const double rho = c.rho0 * rng.uniform(0.3, 1.0);
      const Variant variant = d % 2 == 0 ? Variant::sublevel : Variant::superlevel;
      const double frac = rng.uniform(0.05, 0.45);
      if (!(wmax > 0.0)) break;
      Cylinder cyl = make_cylinder(an.t0, an.x0, rho, wmax, c.solver.m);
      OscStats stats;
      try {
        stats = osc_stats(w, cyl);
      } catch (const Error& e) {
        if (e.code() == Errc::degenerate || e.code() == Errc::out_of_domain) continue;
        throw;
      }
      if (!(stats.omega > 0.0)) continue;
      double k = stats.mu_minus + frac * stats.omega;
      if (variant == Variant::superlevel) {
        cyl.theta0 = c.cascade.theta0;
        k = stats.mu_plus - frac * stats.omega;
      }
      const CaccioppoliResult r =
          caccioppoli_residual(w, forcing, cyl, stats, k, CutoffSpec{}, variant, exps);
      ++drawn;
      const bool ok = std::isfinite(r.ratio);
      finite += ok;
      verification.push_back(to_json(VerificationReport{
          variant == Variant::sublevel ? "caccioppoli.sublevel" : "caccioppoli.superlevel",
          {{"anchor", i}, {"rho", rho}, {"k", k}, {"h", r.h}},
          r.lhs,
          r.rhs_sum,
          r.ratio,
          ok}));
    }
    if (drawn > 0)
      check(tag + ".caccioppoli", finite == drawn,
            std::to_string(finite) + "/" + std::to_string(drawn) + " finite ratios");
  }

  norms["anchors"] = anchor_norms;
  write_json(norms, c.output_dir / "norms.json");
  json fit_doc = {{"sigma", sigma_min ? json(*sigma_min) : json(nullptr)}, {"anchors", fits}};
  write_json(fit_doc, c.output_dir / "holder_fit.json");
  write_json(verification, c.output_dir / "verification.json");

  json checks = json::array();
  for (const auto& ch : summary.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  write_json({{"ok", summary.ok()}, {"seed", c.seed}, {"checks", checks}}, c.output_dir / "summary.json");
  return summary;
}

}  // namespace pmelab
