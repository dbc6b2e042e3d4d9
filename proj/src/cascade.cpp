#include "pmelab/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmelab/error.hpp"
#include "pmelab/field_io.hpp"

namespace pmelab {

double CascadeParams::shrink_ratio(double m, double sigma0) const {
  const double a = std::pow(1.0 - eta0, 1.0 / sigma0);
  const double b = 0.5 * std::pow(1.0 / 3.0, 0.5 * (1.0 - 1.0 / m)) * std::sqrt(0.5 * theta0);
  return std::min(a, b);
}

void CascadeParams::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) fail(Errc::invalid_argument, std::string(name) + " must lie in (0, 1)");
  };
  unit(theta0, "theta0");
  unit(eta0, "eta0");
  unit(delta0, "delta0");
  if (max_levels < 1) fail(Errc::invalid_argument, "max_levels must be >= 1");
}

int CascadeState::osc_violations() const {
  return static_cast<int>(std::count_if(levels.begin(), levels.end(),
                                        [](const CascadeLevel& l) { return !l.pass_osc; }));
}

int CascadeState::nesting_violations() const {
  return static_cast<int>(std::count_if(levels.begin(), levels.end(), [](const CascadeLevel& l) {
    return l.j > 0 && l.nest_condition && !l.nested;
  }));
}

namespace {

bool subset(const CellSet& inner, const CellSet& outer) {
  auto sorted_in = [](auto a, auto b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  return sorted_in(inner.slices, outer.slices) && sorted_in(inner.cells, outer.cells);
}

}  // namespace

CascadeState oscillation_cascade(const Field& field, double m, double t0, Point x0, double rho0,
                                 const CascadeParams& params, const ExponentSet& exponents,
                                 const ForcingPair& forcing, const CascadeOptions& options) {
  params.validate();
  const Grid& g = field.grid();
  if (exponents.n != g.n) fail(Errc::invalid_argument, "exponent set was derived for another dimension");
  if (!(m > 1.0)) fail(Errc::invalid_argument, "exponent m must exceed 1");

  CascadeState st;
  st.params = params;
  st.exponents = exponents;
  st.m = m;
  st.t0 = t0;
  st.x0 = x0;
  st.shrink_ratio = params.shrink_ratio(m, exponents.sigma0);

  const double M0 = options.M0.value_or(field.max());
  if (!(M0 > 0.0)) fail(Errc::degenerate, "intrinsic scale M0 must be positive (field is zero)");
  const double expo = 1.0 - 1.0 / m;
  const double min_rho = 3.0 * g.min_dx();

  CellSet prev_set;
  double rho = rho0;
  double omega = 0.0;
  double M = M0;
  for (int j = 0; j < params.max_levels; ++j) {
    if (j > 0) {
      const CascadeLevel& last = st.levels.back();
      rho = st.shrink_ratio * last.rho;
      omega = (1.0 - params.eta0) * last.omega;
      M = std::max(last.mu_plus, omega);
      if (rho < min_rho) {
        st.stop_reason = "radius below three cells";
        break;
      }
      if (!(M > 0.0)) {
        st.stop_reason = "intrinsic scale vanished";
        break;
      }
    }
    const Cylinder cyl = make_cylinder(t0, x0, rho, M, m);
    CellSet set;
    try {
      set = cylinder_cells(g, cyl);
    } catch (const Error& e) {
      if (j == 0) throw;
      st.stop_reason = std::string("cylinder left the grid: ") + e.what();
      break;
    }
    const Extrema ex = extrema(field, set);

    CascadeLevel L;
    L.j = j;
    L.rho = rho;
    L.M = M;
    L.length = cyl.length();
    L.mu_plus = ex.sup;
    L.mu_minus = ex.inf;
    L.osc = ex.sup - ex.inf;
    L.cells = set.cells.size();
    L.slices = set.slices.size();
    if (j == 0) {
      omega = options.omega0.value_or(L.osc);
      if (!(omega > 0.0)) fail(Errc::degenerate, "initial oscillation is zero (constant field on the first cylinder)");
    }
    L.omega = omega;

    const double tol = 1e-12 * std::max(1.0, M0);
    L.pass_osc = L.osc <= omega + tol;
    L.pass_sup = L.mu_plus <= M + tol;
    L.pass_eq9 = L.pass_osc && L.pass_sup;

    const ForcingNorms fn = forcing.empty()
                                ? ForcingNorms{exponents.p, exponents.q, exponents.sigma0, 0, 0, 0}
                                : forcing_h(forcing, cyl, exponents.p, exponents.q, omega, g.n);
    if (j == 0) st.norms0 = fn;
    L.h = fn.h;
    if (fn.h == 0.0) {
      L.pass_rho_cond = true;
    } else {
      const double rhs = params.delta0 * omega * std::pow(M, -expo / exponents.q) / std::sqrt(fn.h);
      L.pass_rho_cond = std::pow(rho, exponents.sigma0) <= rhs;
    }

    if (j > 0) {
      const CascadeLevel& last = st.levels.back();
      L.nest_condition = M >= last.M / 3.0;
      L.nested = subset(set, prev_set);
      const double chain = std::max(3.0 * omega / (2.0 * (1.0 - params.eta0)), 3.0 * L.mu_plus);
      L.pass_chain = last.mu_plus <= chain + tol;
    }
    st.levels.push_back(L);
    prev_set = std::move(set);
  }
  if (st.stop_reason.empty()) st.stop_reason = "max_levels reached";
  return st;
}

nlohmann::json to_json(const CascadeState& s) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : s.levels) {
    levels.push_back({{"j", l.j},
                      {"rho", l.rho},
                      {"omega", l.omega},
                      {"M", l.M},
                      {"length", l.length},
                      {"mu_plus", l.mu_plus},
                      {"mu_minus", l.mu_minus},
                      {"osc", l.osc},
                      {"cells", l.cells},
                      {"slices", l.slices},
                      {"h", l.h},
                      {"checks",
                       {{"osc_le_omega", l.pass_osc},
                        {"sup_le_M", l.pass_sup},
                        {"eq9", l.pass_eq9},
                        {"rho_condition", l.pass_rho_cond},
                        {"nest_condition", l.nest_condition},
                        {"nested", l.nested},
                        {"sup_chain", l.pass_chain}}}});
  }
  return {{"t0", s.t0},
          {"x0", {s.x0[0], s.x0[1]}},
          {"m", s.m},
          {"theta0", s.params.theta0},
          {"eta0", s.params.eta0},
          {"delta0", s.params.delta0},
          {"shrink_ratio", s.shrink_ratio},
          {"sigma0", s.exponents.sigma0},
          {"stop_reason", s.stop_reason},
          {"osc_violations", s.osc_violations()},
          {"nesting_violations", s.nesting_violations()},
          {"levels", levels}};
}

std::string cascade_csv(const CascadeState& s) {
  std::ostringstream os;
  os << "level,rho,omega,M,osc,pass_eq9,pass_rho_cond\n";
  for (const auto& l : s.levels)
    os << l.j << ',' << format_double(l.rho) << ',' << format_double(l.omega) << ','
       << format_double(l.M) << ',' << format_double(l.osc) << ',' << (l.pass_eq9 ? 1 : 0) << ','
       << (l.pass_rho_cond ? 1 : 0) << '\n';
  return os.str();
}

HolderFit holder_fit(const std::vector<double>& rho, const std::vector<double>& osc, double M0,
                     const ForcingNorms& norms, double m) {
  if (rho.size() != osc.size()) fail(Errc::invalid_argument, "rho and osc tables differ in length");
  HolderFit f;
  const double expo = 1.0 - 1.0 / m;
  f.bracket_terms = {M0, norms.norm_f == 0.0 ? 0.0 : std::pow(M0, expo / norms.q) * norms.norm_f,
                     norms.norm_g == 0.0 ? 0.0 : std::pow(M0, 2.0 * expo / norms.q) * norms.norm_g};
  f.bracket = f.bracket_terms[0] + f.bracket_terms[1] + f.bracket_terms[2];

  if (std::all_of(osc.begin(), osc.end(), [](double o) { return o == 0.0; }) && !osc.empty()) {
    f.flat = true;
    f.sigma = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] > 0.0 && osc[i] > 0.0) {
      lx.push_back(std::log(rho[i]));
      ly.push_back(std::log(osc[i]));
    }
  }
  f.levels_used = static_cast<int>(lx.size());
  if (lx.size() < 3) fail(Errc::insufficient_data, "Hölder fit needs at least 3 levels with positive oscillation");

  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) fail(Errc::insufficient_data, "all levels share one radius");
  f.sigma = sxy / sxx;
  f.intercept = my - f.sigma * mx;
  double cmax = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] > 0.0) cmax = std::max(cmax, osc[i] / std::pow(rho[i], f.sigma));
  f.C_fit = f.bracket > 0.0 ? cmax / f.bracket : 0.0;
  return f;
}

HolderFit holder_fit(const CascadeState& s) {
  std::vector<double> rho;
  std::vector<double> osc;
  for (const auto& l : s.levels) {
    rho.push_back(l.rho);
    osc.push_back(l.osc);
  }
  const double M0 = s.levels.empty() ? 0.0 : s.levels.front().M;
  return holder_fit(rho, osc, M0, s.norms0, s.m);
}

nlohmann::json to_json(const HolderFit& f) {
  nlohmann::json j = {{"flat", f.flat},
                      {"C_fit", f.C_fit},
                      {"intercept", f.intercept},
                      {"bracket", f.bracket},
                      {"bracket_terms", {f.bracket_terms[0], f.bracket_terms[1], f.bracket_terms[2]}},
                      {"levels_used", f.levels_used}};
  j["sigma"] = f.flat ? nlohmann::json(nullptr) : nlohmann::json(f.sigma);
  return j;
}

}  // namespace pmelab
