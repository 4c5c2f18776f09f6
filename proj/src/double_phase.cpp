#include "dphase/double_phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dphase {

std::string to_string(ExponentMode mode) {
  switch (mode) {
    case ExponentMode::strict: return "strict";
    case ExponentMode::relaxed: return "relaxed";
    case ExponentMode::quadratic: return "quadratic";
  }
  return "?";
}

ExponentMode parse_exponent_mode(const std::string& text) {
  if (text == "strict") return ExponentMode::strict;
  if (text == "relaxed") return ExponentMode::relaxed;
  if (text == "quadratic") return ExponentMode::quadratic;
  throw contract_error("exponents: unknown mode '" + text +
                       "' (expected strict, relaxed or quadratic)");
}

void Exponents::check() const {
  if (!(std::isfinite(p) && p > 1.0))
    throw contract_error(fmt::format("exponents: p={} must be > 1", p));
  if (!(std::isfinite(q) && q > 1.0))
    throw contract_error(fmt::format("exponents: q={} must be > 1", q));
  if (n < 1) throw contract_error(fmt::format("exponents: dimension n={} must be >= 1", n));
  if (!is_quadratic() && !(q < p))
    throw contract_error(
        fmt::format("exponents: requires q < p (got q={}, p={})", q, p));
  if (!(std::isfinite(epsilon) && epsilon >= 0.0))
    throw contract_error("exponents: regularization epsilon must be >= 0");
  if (std::min(p, q) < 2.0 && epsilon == 0.0)
    throw contract_error(
        "exponents: regularization epsilon > 0 required when min(p, q) < 2");
  if (strict_sobolev) {
    if (!(q < n))
      throw contract_error(fmt::format(
          "exponents: Sobolev relation 1/p = 1/q - 1/n needs q < n (q={}, n={})",
          q, n));
    if (std::abs(1.0 / p - (1.0 / q - 1.0 / n)) > 1e-12)
      throw contract_error(fmt::format(
          "exponents: Sobolev relation 1/p = 1/q - 1/n violated (p={}, q={}, n={})",
          p, q, n));
  }
}

Exponents validate_exponents(double q, int n, ExponentMode mode,
                             std::optional<double> p_override, double epsilon) {
  if (!(q > 1.0)) throw contract_error(fmt::format("exponents: q={} must be > 1", q));
  Exponents e;
  e.q = q;
  e.n = n;
  e.epsilon = epsilon;
  switch (mode) {
    case ExponentMode::strict: {
      if (!(q < n))
        throw contract_error(fmt::format(
            "exponents: Sobolev relation 1/p = 1/q - 1/n needs q < n; q={} n={} "
            "gives 1/p = {}",
            q, n, 1.0 / q - 1.0 / n));
      e.p = 1.0 / (1.0 / q - 1.0 / n);
      e.strict_sobolev = true;
      if (p_override && std::abs(1.0 / *p_override - 1.0 / e.p) > 1e-12)
        throw contract_error(fmt::format(
            "exponents: p={} contradicts the Sobolev relation (p={})",
            *p_override, e.p));
      break;
    }
    case ExponentMode::relaxed:
      if (!p_override)
        throw contract_error("exponents: relaxed mode needs an explicit p");
      if (!(q < *p_override))
        throw contract_error(fmt::format(
            "exponents: requires q < p (got q={}, p={})", q, *p_override));
      e.p = *p_override;
      break;
    case ExponentMode::quadratic:
      if (q != 2.0 || (p_override && *p_override != 2.0))
        throw contract_error("exponents: quadratic mode means p = q = 2");
      e.p = 2.0;
      break;
  }
  e.check();
  return e;
}

Exponents quadratic_exponents(double epsilon) {
  Exponents e;
  e.epsilon = epsilon;
  e.check();
  return e;
}

// ---------------------------------------------------------------------------

WeightField::WeightField(std::vector<EdgeField> per_axis, double mu1)
    : fields_(std::move(per_axis)), mu1_(mu1) {
  if (fields_.empty()) throw contract_error("weight field: no axes");
  const Grid& g = fields_.front().grid();
  if (static_cast<int>(fields_.size()) != g.dim())
    throw contract_error("weight field: need one edge field per axis");
  if (!(std::isfinite(mu1) && mu1 > 0.0))
    throw contract_error(fmt::format("weight field: bound mu1={} must be > 0", mu1));
  for (int a = 0; a < g.dim(); ++a) {
    require_same_grid(g, fields_[a].grid(), "weight field");
    if (fields_[a].axis() != a) throw contract_error("weight field: axis order");
    for (double v : fields_[a].values())
      if (!(v >= 0.0 && v <= mu1))
        throw contract_error(fmt::format(
            "weight field: value {} outside [0, mu1={}]", v, mu1));
  }
}

WeightField WeightField::constant(const Grid& grid, double mu0,
                                  std::optional<double> mu1) {
  const double bound = mu1.value_or(mu0 > 0.0 ? mu0 : 1.0);
  std::vector<EdgeField> fields;
  for (int a = 0; a < grid.dim(); ++a)
    fields.emplace_back(grid, a, std::vector<double>(grid.edge_count(a), mu0));
  return WeightField(std::move(fields), bound);
}

WeightField WeightField::from_nodal(const GridFunction& mu, double mu1) {
  const Grid& grid = mu.grid();
  const int m = grid.per_axis();
  const int transverse = grid.dim() == 1 ? 1 : m;
  std::vector<EdgeField> fields;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    EdgeField e(grid, axis);
    for (int t = 0; t < transverse; ++t)
      for (int j = 0; j <= m; ++j) {
        const int lo = std::max(j - 1, 0);
        const int hi = std::min(j, m - 1);
        auto value = [&](int pos) {
          return axis == 0 ? mu.at(pos, t) : mu.at(t, pos);
        };
        e[e.index(j, t)] = 0.5 * (value(lo) + value(hi));
      }
    fields.push_back(std::move(e));
  }
  return WeightField(std::move(fields), mu1);
}

WeightField WeightField::ramp(const Grid& grid, double mu0) {
  return from_function(grid, [mu0](double x, double) { return mu0 * x; },
                       mu0 > 0.0 ? mu0 : 1.0);
}

double WeightField::lipschitz_quotient() const {
  const Grid& g = grid();
  const int m = g.per_axis();
  const int transverse = g.dim() == 1 ? 1 : m;
  double worst = 0.0;
  for (const EdgeField& e : fields_)
    for (int t = 0; t < transverse; ++t)
      for (int j = 0; j <= m; ++j) {
        const double v = e[e.index(j, t)];
        if (j < m) worst = std::max(worst, std::abs(e[e.index(j + 1, t)] - v));
        if (t + 1 < transverse)
          worst = std::max(worst, std::abs(e[e.index(j, t + 1)] - v));
      }
  return worst / g.spacing();
}

// ---------------------------------------------------------------------------

namespace {

struct PhaseLaw {
  double p, q, eps2;

  double reg(double s) const { return std::sqrt(s * s + eps2); }

  // (1/p) pi^p + (mu/q) pi^q, split by phase
  double p_density(double s) const { return std::pow(reg(s), p) / p; }
  double q_density(double s) const { return std::pow(reg(s), q) / q; }

  // flux multiplier: pi^{p-2} + mu pi^{q-2}, evaluated at magnitude r
  double multiplier(double r, double mu) const {
    const double pi2 = r * r + eps2;
    double out = half_power(pi2, p);
    if (mu != 0.0) out += mu * half_power(pi2, q);
    return out;
  }

  // pi2^{(expo-2)/2} with the common exponents done without pow
  static double half_power(double pi2, double expo) {
    if (expo == 2.0) return 1.0;
    if (expo == 4.0) return pi2;
    return std::pow(pi2, 0.5 * expo - 1.0);
  }

  // d/ds [pi^{r-2} s] = pi^{r-4} ((r-1) s^2 + eps^2)
  static double slope(double expo, double s, double eps2) {
    if (expo == 2.0) return 1.0;
    const double pi2 = s * s + eps2;
    if (pi2 == 0.0)
      return expo > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(pi2, 0.5 * expo - 2.0) * ((expo - 1.0) * s * s + eps2);
  }
};

PhaseLaw law_for(const Exponents& e) {
  e.check();
  return {e.p, e.q, e.epsilon * e.epsilon};
}

void check_inputs(const GridFunction& u, const WeightField& mu, const char* op) {
  require_same_grid(u.grid(), mu.grid(), op);
}

std::vector<EdgeField> pseudo_fluxes(const GridFunction& u, const WeightField& mu,
                                     const PhaseLaw& law) {
  std::vector<EdgeField> out;
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    EdgeField d = forward_diff(u, axis);
    const EdgeField& w = mu.axis(axis);
    for (std::size_t k = 0; k < d.size(); ++k)
      d[k] = law.multiplier(std::abs(d[k]), w[k]) * d[k];
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

EnergyBreakdown energy(const GridFunction& u, const GridFunction& f,
                       const WeightField& mu, const Exponents& e) {
  check_inputs(u, mu, "energy");
  require_same_grid(u.grid(), f.grid(), "energy");
  const PhaseLaw law = law_for(e);
  EnergyBreakdown out;
  const double vol = u.grid().cell_volume();
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    const EdgeField d = forward_diff(u, axis);
    const EdgeField& w = mu.axis(axis);
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      sp += law.p_density(d[k]);
      if (w[k] != 0.0) sq += w[k] * law.q_density(d[k]);
    }
    out.p_term += sp * vol;
    out.q_term += sq * vol;
  }
  out.load_term = inner(f, u);
  out.total = out.p_term + out.q_term - out.load_term;
  return out;
}

GridFunction apply_pseudo_operator(const GridFunction& u, const WeightField& mu,
                                   const Exponents& e) {
  check_inputs(u, mu, "apply_pseudo_operator");
  const PhaseLaw law = law_for(e);
  GridFunction out(u.grid());
  for (const EdgeField& flux : pseudo_fluxes(u, mu, law))
    out += forward_diff_transpose(flux);
  return out;
}

GridFunction energy_gradient(const GridFunction& u, const GridFunction& f,
                             const WeightField& mu, const Exponents& e) {
  require_same_grid(u.grid(), f.grid(), "energy_gradient");
  GridFunction g = apply_pseudo_operator(u, mu, e);
  g -= f;
  return g;
}

GridFunction apply_divergence_operator(const GridFunction& u,
                                       const WeightField& mu,
                                       const Exponents& e) {
  check_inputs(u, mu, "apply_divergence_operator");
  const PhaseLaw law = law_for(e);
  const Grid& g = u.grid();
  const int m = g.per_axis();
  const int transverse = g.dim() == 1 ? 1 : m;

  std::vector<EdgeField> diffs;
  for (int axis = 0; axis < g.dim(); ++axis) diffs.push_back(forward_diff(u, axis));

  GridFunction out(g);
  for (int axis = 0; axis < g.dim(); ++axis) {
    EdgeField flux = diffs[axis];
    const EdgeField& w = mu.axis(axis);
    for (int t = 0; t < transverse; ++t)
      for (int j = 0; j <= m; ++j) {
        const std::size_t k = flux.index(j, t);
        const double s = diffs[axis][k];
        double mag2 = s * s;
        if (g.dim() == 2) {
          // transverse differences at the edges touching the two end nodes;
          // ghost end nodes contribute zero
          const EdgeField& other = diffs[1 - axis];
          double sum = 0.0;
          for (int pos : {j - 1, j}) {
            if (pos < 0 || pos >= m) continue;
            sum += other[other.index(t, pos)] + other[other.index(t + 1, pos)];
          }
          const double avg = 0.25 * sum;
          mag2 += avg * avg;
        }
        const double r = g.dim() == 2 ? std::sqrt(mag2) : std::abs(s);
        flux[k] = law.multiplier(r, w[k]) * s;
      }
    out += forward_diff_transpose(flux);
  }
  return out;
}

double weak_residual(const GridFunction& u, const GridFunction& f,
                     const WeightField& mu, const Exponents& e,
                     const GridFunction& phi) {
  check_inputs(u, mu, "weak_residual");
  require_same_grid(u.grid(), f.grid(), "weak_residual");
  require_same_grid(u.grid(), phi.grid(), "weak_residual");
  const PhaseLaw law = law_for(e);
  const auto fluxes = pseudo_fluxes(u, mu, law);
  double lhs = 0.0;
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    EdgeField prod = forward_diff(phi, axis);
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] *= fluxes[axis][k];
    lhs += quadrature(prod);
  }
  return lhs - inner(f, phi);
}

Linearization linearize(const GridFunction& u, const WeightField& mu,
                        const Exponents& e) {
  check_inputs(u, mu, "hessian");
  const PhaseLaw law = law_for(e);
  Linearization lin;
  bool singular = false;
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    EdgeField a = forward_diff(u, axis);
    const EdgeField& w = mu.axis(axis);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double s = a[k];
      double c = PhaseLaw::slope(e.p, s, law.eps2);
      if (w[k] != 0.0) c += w[k] * PhaseLaw::slope(e.q, s, law.eps2);
      if (!(c > 0.0 && std::isfinite(c))) singular = true;
      a[k] = c;
    }
    lin.coefficients.push_back(std::move(a));
  }
  if (singular)
    throw singular_linearization(
        "hessian: vanishing edge gradient with epsilon = 0 makes the "
        "linearization singular; use a positive regularization");
  return lin;
}

GridFunction Linearization::apply(const GridFunction& w) const {
  GridFunction out(w.grid());
  for (const EdgeField& a : coefficients) {
    require_same_grid(a.grid(), w.grid(), "hessian_apply");
    EdgeField d = forward_diff(w, a.axis());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= a[k];
    out += forward_diff_transpose(d);
  }
  return out;
}

double Linearization::min_coefficient() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const EdgeField& a : coefficients)
    for (double v : a.values()) lo = std::min(lo, v);
  return lo;
}

GridFunction hessian_apply(const GridFunction& u, const GridFunction& w,
                           const WeightField& mu, const Exponents& e) {
  return linearize(u, mu, e).apply(w);
}

}  // namespace dphase
