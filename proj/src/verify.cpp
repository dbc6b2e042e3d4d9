#include "pmelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmelab/error.hpp"
#include "pmelab/geometry.hpp"
#include "pmelab/norms.hpp"

namespace pmelab {

void RecursionParams::validate() const {
  if (!(C > 0.0)) fail(Errc::invalid_argument, "C must be positive");
  if (!(b >= 1.0)) fail(Errc::invalid_argument, "b must be >= 1");
  if (!(delta > 0.0) || !(eps > 0.0)) fail(Errc::invalid_argument, "delta and eps must be positive");
}

double RecursionParams::d() const { return std::min(delta, eps / (1.0 + eps)); }

double RecursionParams::lambda() const {
  const double dd = d();
  const double a = std::pow(2.0 * C, -1.0 / delta) * std::pow(b, -1.0 / (delta * dd));
  const double c = std::pow(2.0 * C, -(1.0 + eps) / eps) * std::pow(b, -1.0 / (eps * dd));
  return std::min(a, c);
}

RecursionTrace recursion_lemma(const RecursionParams& params, double Y0, double Z0, int n_steps) {
  params.validate();
  if (!(Y0 > 0.0) || !(Z0 > 0.0)) fail(Errc::invalid_argument, "Y0 and Z0 must be positive");
  if (n_steps < 1) fail(Errc::invalid_argument, "n_steps must be >= 1");
  const double slack = 1.0 + 1e-12;
  RecursionTrace tr;
  tr.d = params.d();
  tr.lambda = params.lambda();
  const double e1 = 1.0 + params.eps;
  tr.thresholds_met = Y0 <= tr.lambda && Z0 <= std::pow(tr.lambda, 1.0 / e1);

  tr.Y.push_back(Y0);
  tr.Z.push_back(Z0);
  tr.bound_holds = true;
  for (int n = 0; n <= n_steps; ++n) {
    const double Y = tr.Y[n];
    const double Z = tr.Z[n];
    const double bound = tr.lambda * std::pow(params.b, -n / tr.d);
    if (Y > bound * slack || Z > std::pow(bound, 1.0 / e1) * slack) tr.bound_holds = false;
    if (n == n_steps) break;
    const double cb = params.C * std::pow(params.b, n);
    const double Zp = std::pow(Z, e1);
    const double Yn = cb * (std::pow(Y, 1.0 + params.delta) + std::pow(Y, params.delta) * Zp);
    const double Zn = cb * (Y + Zp);
    if (!std::isfinite(Yn) || !std::isfinite(Zn)) {
      tr.diverged_at = n + 1;
      tr.bound_holds = false;
      break;
    }
    tr.Y.push_back(Yn);
    tr.Z.push_back(Zn);
  }
  tr.bound_ok = !tr.thresholds_met || tr.bound_holds;
  return tr;
}

InequalityCheck ladyzhenskaya_check(const Field& field, double p, double q) {
  const Grid& g = field.grid();
  const int n = g.n;
  if (!(p >= 2.0) || !(q >= 2.0)) fail(Errc::invalid_argument, "need p, q >= 2");
  const double lhs_id = (std::isinf(q) ? 0.0 : 2.0 / q) + (std::isinf(p) ? 0.0 : n / p);
  if (std::abs(lhs_id - 0.5 * n) > 1e-12)
    fail(Errc::invalid_argument, "exponents must satisfy 2/q + n/p = n/2");
  if (n == 2 && q == 2.0 && std::isinf(p))
    fail(Errc::invalid_argument, "the pair q = 2, p = inf is excluded in two dimensions");

  const double vol = g.cell_volume();
  const double dt = g.dt();
  double lq = 0.0;
  double sup_l2 = 0.0;
  double grad2 = 0.0;
  for (int k = 0; k < g.slices(); ++k) {
    const auto v = field.slice(k);
    const double lp = strong_lp_norm(v, p, vol);
    if (std::isinf(q))
      lq = std::max(lq, lp);
    else
      lq += std::pow(lp, q) * dt;
    sup_l2 = std::max(sup_l2, strong_lp_norm(v, 2.0, vol));
    for (std::size_t c = 0; c < g.cells(); ++c)
      for (int a = 0; a < n; ++a) {
        const double d = gradient_component(v, g, c, a);
        grad2 += d * d * vol * dt;
      }
  }
  InequalityCheck r;
  r.lhs = std::isinf(q) ? lq : std::pow(lq, 1.0 / q);
  r.rhs = sup_l2 + std::sqrt(grad2);
  r.ratio = r.lhs == 0.0 ? 0.0 : r.lhs / r.rhs;
  return r;
}

InequalityCheck poincare_levelset_check(const Grid& grid, std::span<const double> slice, Point x0,
                                        double rho, double k, double l) {
  if (!(l > k)) fail(Errc::invalid_argument, "need l > k");
  if (slice.size() != grid.cells()) fail(Errc::invalid_argument, "slice does not match grid");
  const auto cells = ball_cells(grid, x0, rho);
  const double vol = grid.cell_volume();
  const double ball = static_cast<double>(cells.size()) * vol;
  double above_l = 0.0;
  double above_k = 0.0;
  double grad_int = 0.0;
  for (auto c : cells) {
    const double f = slice[c];
    if (f > l) above_l += vol;
    if (f > k) above_k += vol;
    // Share of the cell's linearized value range [f - r, f + r] inside
    // (k, l]; sampling the band at centers alone misses thin bands.
    double g2 = 0.0;
    double r = 0.0;
    for (int a = 0; a < grid.n; ++a) {
      const double d = gradient_component(slice, grid, c, a);
      g2 += d * d;
      r += 0.5 * std::abs(d) * grid.dx(a);
    }
    const double share = r > 0.0 ? std::max(0.0, std::min(f + r, l) - std::max(f - r, k)) / (2.0 * r)
                                 : double(f > k && f <= l);
    grad_int += std::sqrt(g2) * share * vol;
  }
  InequalityCheck r;
  r.lhs = (l - k) * above_l;
  const double denom = ball - above_k;
  if (denom <= 0.0) {
    r.degenerate = true;
    r.rhs = std::numeric_limits<double>::infinity();
    r.ratio = 0.0;
    return r;
  }
  r.rhs = std::pow(rho, grid.n + 1) / denom * grad_int;
  if (r.lhs == 0.0)
    r.ratio = 0.0;
  else
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : std::numeric_limits<double>::infinity();
  return r;
}

nlohmann::json to_json(const VerificationReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"check", r.check}, {"params", r.params}, {"lhs", num(r.lhs)},
          {"rhs", num(r.rhs)}, {"ratio", num(r.ratio)}, {"pass", r.pass}};
}

}  // namespace pmelab
