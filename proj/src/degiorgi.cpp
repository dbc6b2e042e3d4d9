#include "pmelab/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmelab/error.hpp"
#include "pmelab/norms.hpp"

namespace pmelab {

namespace {

bool on_side(double u, double k, Side side) { return side == Side::below ? u < k : u > k; }

void require_oscillation(const OscStats& s) {
  if (!(s.omega > 0.0)) fail(Errc::degenerate, "oscillation bound omega is zero");
}

Cylinder with_radius(const Cylinder& c, double rho) {
  Cylinder out = c;
  out.rho = rho;
  return out;
}

}  // namespace

double levelset_measure(const Field& field, const CellSet& set, double k, Side side) {
  std::size_t count = 0;
  for (int s : set.slices) {
    const auto v = field.slice(s);
    for (auto c : set.cells)
      if (on_side(v[c], k, side)) ++count;
  }
  return static_cast<double>(count) * field.grid().spacetime_cell_measure();
}

double levelset_measure(const Field& field, int slice, std::span<const std::size_t> cells,
                        double k, Side side) {
  const auto v = field.slice(slice);
  std::size_t count = 0;
  for (auto c : cells)
    if (on_side(v[c], k, side)) ++count;
  return static_cast<double>(count) * field.grid().cell_volume();
}

AlternativeResult alternative_classify(const Field& field, const Cylinder& cyl,
                                       const OscStats& stats, double theta0) {
  require_oscillation(stats);
  if (!(theta0 > 0.0 && theta0 < 1.0)) fail(Errc::invalid_argument, "theta0 must lie in (0, 1)");
  const CellSet set = cylinder_cells(field.grid(), cyl);
  AlternativeResult r;
  r.fraction =
      levelset_measure(field, set, stats.mu_minus + 0.5 * stats.omega, Side::below) / set.measure;
  r.which = r.fraction <= theta0 ? Alternative::first : Alternative::second;
  return r;
}

IterationTrace yz_sequences(const Field& field, const Cylinder& cyl, const OscStats& stats,
                            const ExponentSet& exponents, Variant variant, int i_max, int q0) {
  require_oscillation(stats);
  if (i_max < 0) fail(Errc::invalid_argument, "i_max must be nonnegative");
  if (variant == Variant::superlevel && q0 < 0) fail(Errc::invalid_argument, "q0 must be >= 0");
  const Grid& g = field.grid();
  const double rho = cyl.rho;
  const double omega = stats.omega;
  const bool sub = variant == Variant::sublevel;
  const Side side = sub ? Side::below : Side::above;

  IterationTrace tr;
  tr.variant = variant;
  tr.exponents = exponents;
  tr.q0 = sub ? 0 : q0;

  const double rho0 = sub ? rho : 0.75 * rho;
  const CellSet base = cylinder_cells(g, with_radius(cyl, rho0));
  const double intrinsic = std::pow(cyl.M, 1.0 - 1.0 / cyl.m);
  const double ratio = exponents.q_star / exponents.p_star;
  tr.floor = g.spacetime_cell_measure() / base.measure;

  for (int i = 0; i <= i_max; ++i) {
    double k = 0.0;
    double r = 0.0;
    if (sub) {
      k = stats.mu_minus + omega / 4.0 + omega / std::ldexp(1.0, i + 1);
      r = rho / 2.0 + rho / std::ldexp(1.0, i + 1);
    } else {
      k = stats.mu_plus - omega / std::ldexp(1.0, q0 + 2) - omega / std::ldexp(1.0, q0 + i + 2);
      r = rho / 2.0 + rho / std::ldexp(1.0, i + 2);
    }
    const CellSet set = cylinder_cells(g, with_radius(cyl, r));
    const double Y = levelset_measure(field, set, k, side) / base.measure;
    double acc = 0.0;
    for (int s : set.slices) {
      const double mn = levelset_measure(field, s, set.cells, k, side);
      if (mn > 0.0) acc += std::pow(mn, ratio) * g.dt() * intrinsic;
    }
    const double Z = rho0 * rho0 / (base.measure * intrinsic) * std::pow(acc, 2.0 / exponents.q_star);
    tr.k.push_back(k);
    tr.rho.push_back(r);
    tr.Y.push_back(Y);
    tr.Z.push_back(Z);
    if (tr.converged_at < 0 && Y < 1e-3) tr.converged_at = i;
  }
  return tr;
}

nlohmann::json to_json(const IterationTrace& t) {
  return {{"variant", t.variant == Variant::sublevel ? "sublevel" : "superlevel"},
          {"q0", t.q0},
          {"p_star", t.exponents.p_star},
          {"q_star", t.exponents.q_star},
          {"k", t.k},
          {"rho", t.rho},
          {"Y", t.Y},
          {"Z", t.Z},
          {"converged_at", t.converged_at},
          {"floor", t.floor}};
}

CutoffValue evaluate_cutoff(const Cylinder& cyl, const CutoffSpec& spec, double t, const Point& x,
                            int n) {
  CutoffValue v;
  const double a = cyl.t0 - cyl.length();
  const double span = spec.tau * cyl.length();
  const double z = (t - a) / span;
  const double T = std::clamp(z, 0.0, 1.0);
  // Left derivative: the ramp is used on (a, b], so the node at the end of
  // the ramp still sees the slope.
  const double T_t = (z > 0.0 && z <= 1.0 + 1e-12) ? 1.0 / span : 0.0;

  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += (x[i] - cyl.x0[i]) * (x[i] - cyl.x0[i]);
  const double w = spec.sigma * cyl.rho;
  const double zz = (cyl.rho - std::sqrt(r2)) / w;
  double S = 0.0;
  double dS = 0.0;
  if (zz >= 1.0) {
    S = 1.0;
  } else if (zz > 0.0) {
    S = zz * zz * zz * (zz * (6.0 * zz - 15.0) + 10.0);
    dS = 30.0 * zz * zz * (1.0 - zz) * (1.0 - zz);
  }
  v.eta = T * S;
  v.eta_t = T_t * S;
  v.grad_norm = T * dS / w;
  return v;
}


CaccioppoliResult caccioppoli_residual(const Field& field, const ForcingPair& forcing,
                                       const Cylinder& cyl, const OscStats& stats, double k,
                                       const CutoffSpec& cutoff, Variant variant,
                                       const std::optional<ExponentSet>& exponents) {
  require_oscillation(stats);
  const bool sub = variant == Variant::sublevel;
  if (sub) {
    if (!(k > stats.mu_minus && k < stats.mu_minus + 0.5 * stats.omega))
      fail(Errc::invalid_argument, "sublevel k must satisfy mu- < k < mu- + omega/2");
  } else {
    if (!(k >= stats.mu_plus - 0.5 * stats.omega))
      fail(Errc::invalid_argument, "superlevel k must satisfy k >= mu+ - omega/2");
    if (!cyl.theta0) fail(Errc::invalid_argument, "superlevel estimate needs a theta0 cylinder");
  }
  if (!(cutoff.sigma > 0.0 && cutoff.sigma <= 1.0) || !(cutoff.tau > 0.0 && cutoff.tau <= 1.0))
    fail(Errc::invalid_argument, "cutoff fractions must lie in (0, 1]");

  const Cylinder Q = sub ? cyl.full() : cyl;
  const Grid& g = field.grid();
  const CellSet set = cylinder_cells(g, Q);
  const double vol = g.cell_volume();
  const double dt = g.dt();
  const double expo = 1.0 - 1.0 / Q.m;
  const double weight = sub ? std::pow(stats.mu_plus, expo) : std::pow(Q.M, expo);
  const double time_weight = sub ? stats.omega : std::pow(Q.M / stats.mu_plus, expo);

  const bool forced = !forcing.empty();
  double mexp = 0.0;
  CaccioppoliResult r;
  r.variant = variant;
  r.k = k;
  if (forced) {
    if (!exponents) fail(Errc::invalid_argument, "forced estimate needs the exponent set");
    r.h = forcing_h(forcing, Q, exponents->p, exponents->q, stats.omega, g.n).h;
    mexp = exponents->q_prime * (0.5 - 1.0 / exponents->p);
  }

  std::vector<double> trunc(g.cells());
  double grad_sum = 0.0;
  double rhs1 = 0.0;
  double rhs2 = 0.0;
  double level_acc = 0.0;
  for (int s : set.slices) {
    const double t = g.time(s);
    const auto u = field.slice(s);
    // Zero outside the ball (where η vanishes), so differences at the edge
    // cells do not pick up truncations from outside.
    std::fill(trunc.begin(), trunc.end(), 0.0);
    for (auto c : set.cells) trunc[c] = sub ? std::max(k - u[c], 0.0) : std::max(u[c] - k, 0.0);
    double slice_sup = 0.0;
    std::size_t level_count = 0;
    for (auto c : set.cells) {
      const CutoffValue eta = evaluate_cutoff(Q, cutoff, t, g.point(c), g.n);
      const double v = trunc[c];
      double gv2 = 0.0;
      for (int a = 0; a < g.n; ++a) {
        const double d = gradient_component(trunc, g, c, a);
        gv2 += d * d;
      }
      const double e2 = eta.eta * eta.eta;
      slice_sup += v * v * e2;
      grad_sum += gv2 * e2;
      rhs1 += sub ? v * eta.eta * eta.eta_t : v * v * 2.0 * eta.eta * eta.eta_t;
      rhs2 += v * v * eta.grad_norm * eta.grad_norm;
      if (v > 0.0) ++level_count;
    }
    r.lhs_sup = std::max(r.lhs_sup, slice_sup * vol);
    if (forced && level_count > 0)
      level_acc += std::pow(static_cast<double>(level_count) * vol, mexp) * dt;
  }
  r.lhs_grad = weight * grad_sum * vol * dt;
  r.lhs = r.lhs_sup + r.lhs_grad;
  r.rhs[0] = time_weight * rhs1 * vol * dt;
  r.rhs[1] = weight * rhs2 * vol * dt;
  r.rhs[2] = forced ? weight * r.h * std::pow(level_acc, 2.0 / exponents->q_prime) : 0.0;
  r.rhs_sum = r.rhs[0] + r.rhs[1] + r.rhs[2];
  if (r.lhs == 0.0)
    r.ratio = 0.0;
  else
    r.ratio = r.rhs_sum > 0.0 ? r.lhs / r.rhs_sum : std::numeric_limits<double>::infinity();
  return r;
}

nlohmann::json to_json(const CaccioppoliResult& r) {
  return {{"variant", r.variant == Variant::sublevel ? "sublevel" : "superlevel"},
          {"k", r.k},
          {"lhs", r.lhs},
          {"lhs_sup", r.lhs_sup},
          {"lhs_grad", r.lhs_grad},
          {"rhs", {r.rhs[0], r.rhs[1], r.rhs[2]}},
          {"ratio", r.ratio},
          {"h", r.h}};
}

GoodSlice select_good_slice(const Field& field, const Cylinder& cyl, const OscStats& stats,
                            double theta, double theta0) {
  if (!(theta > 0.0 && theta < theta0 && theta0 < 1.0))
    fail(Errc::invalid_argument, "need 0 < theta < theta0 < 1");
  const Cylinder Q = cyl.full();
  const AlternativeResult alt = alternative_classify(field, Q, stats, theta0);
  if (alt.which == Alternative::first) {
    std::ostringstream os;
    os << "sublevel fraction " << alt.fraction << " <= theta0 = " << theta0
       << "; the slice selection needs the second alternative";
    fail(Errc::hypothesis_not_satisfied, os.str());
  }
  const Grid& g = field.grid();
  const auto cells = ball_cells(g, Q.x0, Q.rho);
  const double ball = static_cast<double>(cells.size()) * g.cell_volume();
  const double L = Q.length();
  const double hi = Q.t0 - theta * L;
  const double eps = 1e-9 * g.dt();
  GoodSlice out;
  out.bound = (1.0 - theta0) / (1.0 - theta) * ball;
  const double level = stats.mu_minus + 0.5 * stats.omega;
  for (int s : slices_in(g, {Q.t0 - L, hi})) {
    if (g.time(s) >= hi - eps) continue;
    const double mn = levelset_measure(field, s, cells, level, Side::above);
    if (mn <= out.bound) {
      out.slice = s;
      out.time = g.time(s);
      out.measure = mn;
      return out;
    }
  }
  fail(Errc::not_found,
       "no time slice in the early part of the cylinder satisfies the measure bound "
       "(counterexample to the slice selection)");
}

double log_psi(double xi, double mu_plus, double k, double H, double c) {
  const double x = std::min(xi, mu_plus);
  const double d = H - std::max(x - k, 0.0) + c;
  return std::max(std::log(H / d), 0.0);
}

LogShrinkReport log_levelset_shrink(const Field& field, const Cylinder& cyl,
                                    const OscStats& stats, double theta0, int r0_level) {
  require_oscillation(stats);
  if (r0_level <= 2) fail(Errc::invalid_argument, "dyadic level must exceed 2");
  if (!(theta0 > 0.0 && theta0 < 1.0)) fail(Errc::invalid_argument, "theta0 must lie in (0, 1)");
  LogShrinkReport rep;
  rep.k = stats.mu_minus + 0.5 * stats.omega;
  rep.H = stats.mu_plus - rep.k;
  if (!(rep.H > 0.0)) fail(Errc::degenerate, "H = mu+ - k must be positive");
  rep.c = stats.omega / std::ldexp(1.0, r0_level);
  rep.psi_bound = (r0_level - 1) * std::log(2.0);

  const Grid& g = field.grid();
  const Cylinder Q = cyl.full();
  const CellSet set = cylinder_cells(g, Q);
  for (int s : set.slices) {
    const auto u = field.slice(s);
    double e = 0.0;
    for (auto c : set.cells) {
      const double p = log_psi(u[c], stats.mu_plus, rep.k, rep.H, rep.c);
      rep.psi_max = std::max(rep.psi_max, p);
      e += p * p;
    }
    rep.psi_energy = std::max(rep.psi_energy, e * g.cell_volume());
  }

  const CellSet shortened = cylinder_cells(g, Q.shortened(theta0));
  const double level = stats.mu_plus - stats.omega / std::ldexp(1.0, r0_level);
  const double bound = (1.0 - 0.25 * theta0 * theta0) * shortened.ball_measure;
  rep.all_pass = true;
  for (int s : shortened.slices) {
    SliceCheck sc;
    sc.slice = s;
    sc.time = g.time(s);
    sc.measure = levelset_measure(field, s, shortened.cells, level, Side::above);
    sc.bound = bound;
    sc.pass = sc.measure <= bound;
    rep.all_pass = rep.all_pass && sc.pass;
    rep.slices.push_back(sc);
  }
  return rep;
}

DyadicResult dyadic_measure_decay(const Field& field, const Cylinder& cyl, const OscStats& stats,
                                  double theta0, double nu, int q0_max, int q0_min) {
  require_oscillation(stats);
  if (!(nu > 0.0 && nu < 1.0)) fail(Errc::invalid_argument, "nu must lie in (0, 1)");
  if (q0_min < 0 || q0_max < q0_min) fail(Errc::invalid_argument, "need 0 <= q0_min <= q0_max");
  Cylinder Q = with_radius(cyl.full(), 0.75 * cyl.rho);
  Q.theta0 = theta0;
  const CellSet set = cylinder_cells(field.grid(), Q);
  DyadicResult res;
  for (int q = q0_min; q <= q0_max; ++q) {
    DyadicRow row;
    row.q0 = q;
    row.level = stats.mu_plus - stats.omega / std::ldexp(1.0, q + 1);
    row.fraction = levelset_measure(field, set, row.level, Side::above) / set.measure;
    res.table.push_back(row);
    if (!res.q0 && row.fraction <= nu) res.q0 = q;
  }
  return res;
}

}  // namespace pmelab
