#include "pmelab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pmelab/error.hpp"

namespace pmelab {

double distribution_function(std::span<const double> values, double lambda, double cell_volume) {
  std::size_t count = 0;
  for (double v : values)
    if (std::abs(v) > lambda) ++count;
  return static_cast<double>(count) * cell_volume;
}

namespace {

std::vector<double> sorted_abs_desc(std::span<const double> values) {
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

}  // namespace

double weak_lp_norm(std::span<const double> values, double p, double cell_volume) {
  if (!(p > 1.0)) fail(Errc::invalid_argument, "weak norm needs p > 1");
  const auto a = sorted_abs_desc(values);
  const double e = 1.0 - 1.0 / p;
  double best = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    prefix += a[k];
    const double K = static_cast<double>(k + 1) * cell_volume;
    best = std::max(best, prefix * cell_volume / std::pow(K, e));
  }
  return best;
}

double strong_lp_norm(std::span<const double> values, double p, double cell_volume) {
  if (!(p >= 1.0)) fail(Errc::invalid_argument, "strong norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return std::pow(s * cell_volume, 1.0 / p);
}

MarcinkiewiczReport marcinkiewicz_bounds(std::span<const double> values, double p,
                                         double cell_volume) {
  if (!(p > 1.0)) fail(Errc::invalid_argument, "weak norm needs p > 1");
  MarcinkiewiczReport r;
  r.p = p;
  r.weak_norm = weak_lp_norm(values, p, cell_volume);
  r.constant = (p - 1.0) / std::pow(p, 1.0 + 1.0 / p);
  const auto a = sorted_abs_desc(values);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) break;
    if (i > 0 && a[i] == a[i - 1]) continue;
    const double lambda = a[i] * (1.0 - 1e-9);
    const double mu = distribution_function(values, lambda, cell_volume);
    r.sup_quantity = std::max(r.sup_quantity, lambda * std::pow(mu, 1.0 / p));
  }
  const double slack = 1e-12 * r.weak_norm;
  r.lower_ok = r.constant * r.weak_norm <= r.sup_quantity + slack;
  r.upper_ok = r.sup_quantity <= r.weak_norm + slack;
  return r;
}

double mixed_norm(const Field& field, const Cylinder& cyl, const NormSpec& spec) {
  const Grid& g = field.grid();
  const CellSet set = cylinder_cells(g, cyl);
  if (!(spec.q >= 1.0)) fail(Errc::invalid_argument, "time exponent q must be >= 1");
  std::vector<double> buf(set.cells.size());
  double acc = 0.0;
  for (int k : set.slices) {
    const auto v = field.slice(k);
    for (std::size_t i = 0; i < set.cells.size(); ++i) buf[i] = v[set.cells[i]];
    const double inner = spec.weak ? weak_lp_norm(buf, spec.p, g.cell_volume())
                                   : strong_lp_norm(buf, spec.p, g.cell_volume());
    if (std::isinf(spec.q))
      acc = std::max(acc, inner);
    else
      acc += std::pow(inner, spec.q) * g.dt();
  }
  return std::isinf(spec.q) ? acc : std::pow(acc, 1.0 / spec.q);
}

Field magnitude(std::span<const Field> components) {
  if (components.empty()) fail(Errc::invalid_argument, "no components");
  const Grid& g = components[0].grid();
  std::vector<double> out(components[0].values().size(), 0.0);
  for (const auto& c : components) {
    if (!(c.grid() == g)) fail(Errc::invalid_argument, "components live on different grids");
    const auto v = c.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * v[i];
  }
  for (double& x : out) x = std::sqrt(x);
  return Field(g, std::move(out), "|f|");
}

ForcingNorms forcing_h(const ForcingPair& forcing, const Cylinder& cyl, double p, double q,
                       double omega, int n) {
  const ExponentSet e = derive_exponents(p, q, n);
  if (!(omega >= 0.0)) fail(Errc::invalid_argument, "omega must be nonnegative");
  ForcingNorms r;
  r.p = p;
  r.q = q;
  r.sigma0 = e.sigma0;
  if (!forcing.f.empty()) {
    const Field fm = magnitude(forcing.f);
    r.norm_f = mixed_norm(fm, cyl, {p, q, true});
  }
  if (forcing.g) r.norm_g = mixed_norm(*forcing.g, cyl, {p / 2.0, q / 2.0, true});
  r.h = r.norm_f * r.norm_f + omega * r.norm_g;
  return r;
}

nlohmann::json to_json(const ForcingNorms& n) {
  return {{"p", n.p},           {"q", n.q},           {"sigma0", n.sigma0},
          {"norm_f", n.norm_f}, {"norm_g", n.norm_g}, {"h", n.h}};
}

}  // namespace pmelab
