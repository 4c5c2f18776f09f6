#include "dphase/solver.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dphase {

void SolverConfig::check() const {
  if (!(tol_grad > 0.0)) throw contract_error("solver: tol_grad must be > 0");
  if (max_iters < 1) throw contract_error("solver: max_iters must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw contract_error("solver: armijo_c must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw contract_error("solver: backtrack must lie in (0, 1)");
}

SolverConfig SolverConfig::defaults_for(const Exponents& e) {
  SolverConfig cfg;
  cfg.tol_grad = e.is_quadratic() ? 1e-8 : 1e-6;
  return cfg;
}

namespace {

// Edge data along a fixed search line u + t*dir, so each trial step only
// touches the nonlinear part.
class LineModel {
 public:
  LineModel(const GridFunction& u, const GridFunction& dir, const GridFunction& f,
            const WeightField& mu, const Exponents& e)
      : p_(e.p), q_(e.q), eps2_(e.epsilon * e.epsilon),
        volume_(u.grid().cell_volume()), linear_(inner(f, dir)) {
    const std::size_t edges = u.grid().dim() * u.grid().edge_count(0);
    for (auto* v : {&s_, &d_, &w_, &pi_, &pow_p_, &pow_q_}) v->reserve(edges);
    for (int axis = 0; axis < u.grid().dim(); ++axis) {
      const EdgeField s = forward_diff(u, axis);
      const EdgeField d = forward_diff(dir, axis);
      const EdgeField& w = mu.axis(axis);
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (d[k] == 0.0) continue;
        s_.push_back(s[k]);
        d_.push_back(d[k]);
        w_.push_back(w[k]);
        const double pi = std::sqrt(s[k] * s[k] + eps2_);
        pi_.push_back(pi);
        pow_p_.push_back(even(p_) ? 0.0 : std::pow(pi, p_));
        pow_q_.push_back(even(q_) || w[k] == 0.0 ? 0.0 : std::pow(pi, q_));
      }
    }
  }

  double change(double t) const {
    double sum = 0.0;
    double l1 = 0.0;
    // a^r - b^r = b^r expm1(r log1p((a-b)/b)) for r not 2 or 4
    auto phase_change = [&](double r, double pi_old, double pow_old, double dsq) {
      if (r == 2.0) return dsq;
      if (r == 4.0) return dsq * (2.0 * pi_old * pi_old + dsq);
      return pow_old * std::expm1(r * l1);
    };
    for (std::size_t k = 0; k < s_.size(); ++k) {
      const double ds = t * d_[k];
      if (ds == 0.0) continue;
      const double s_new = s_[k] + ds;
      const double pi_old = pi_[k];
      const double pi_new = std::sqrt(s_new * s_new + eps2_);
      const double denom = pi_old + pi_new;
      const double dpi = denom > 0.0 ? ds * (s_[k] + s_new) / denom : 0.0;
      if (dpi == 0.0) continue;
      // pi_new^2 - pi_old^2, free of cancellation
      const double dsq = ds * (s_[k] + s_new);
      const bool need_q = w_[k] != 0.0;
      if (pi_old == 0.0) {
        sum += std::pow(pi_new, p_) / p_;
        if (need_q) sum += w_[k] * std::pow(pi_new, q_) / q_;
        continue;
      }
      if (!(even(p_) && (!need_q || even(q_)))) l1 = std::log1p(dpi / pi_old);
      sum += phase_change(p_, pi_old, pow_p_[k], dsq) / p_;
      if (need_q) sum += w_[k] * phase_change(q_, pi_old, pow_q_[k], dsq) / q_;
    }
    return sum * volume_ - t * linear_;
  }

 private:
  static bool even(double r) { return r == 2.0 || r == 4.0; }

  double p_, q_, eps2_, volume_, linear_;
  std::vector<double> s_, d_, w_, pi_, pow_p_, pow_q_;
};

}  // namespace

double energy_change(const GridFunction& u, const GridFunction& direction,
                     double t, const GridFunction& f, const WeightField& mu,
                     const Exponents& e) {
  e.check();
  require_same_grid(u.grid(), direction.grid(), "energy_change");
  require_same_grid(u.grid(), f.grid(), "energy_change");
  require_same_grid(u.grid(), mu.grid(), "energy_change");
  return LineModel(u, direction, f, mu, e).change(t);
}

SolveReport solve_inner(const GridFunction& f, const WeightField& mu,
                        const Exponents& e, const SolverConfig& cfg) {
  cfg.check();
  e.check();
  require_same_grid(f.grid(), mu.grid(), "solve_inner");
  GridFunction u = cfg.init ? *cfg.init : GridFunction(f.grid());
  require_same_grid(u.grid(), f.grid(), "solve_inner init");

  SolveReport report{.u_star = u, .energy_trace = {}, .energy_decrements = {}, .message = {}};
  double current = energy(u, f, mu, e).total;
  report.energy_trace.push_back(current);
  GridFunction g = energy_gradient(u, f, mu, e);
  double step = 1.0;

  int it = 0;
  for (;; ++it) {
    const double gnorm = max_norm(g);
    report.final_grad_norm = gnorm;
    if (gnorm <= cfg.tol_grad) {
      report.converged = true;
      break;
    }
    if (it >= cfg.max_iters) {
      report.message = fmt::format("iteration cap {} reached", cfg.max_iters);
      break;
    }

    const double gg = inner(g, g);
    GridFunction descent = -1.0 * g;
    double change = 0.0;
    bool accepted = false;
    const LineModel line(u, descent, f, mu, e);
    while (step >= 1e-16) {
      change = line.change(step);
      if (change <= -cfg.armijo_c * step * gg && change < 0.0) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      report.stalled = true;
      report.message = "line search stalled (step below 1e-16)";
      break;
    }

    u.axpy(step, descent);
    current += change;
    report.energy_trace.push_back(current);
    report.energy_decrements.push_back(change);

    GridFunction g_new = energy_gradient(u, f, mu, e);
    // Barzilai-Borwein: <s,s>/<s,y> with s = -step g, y = g_new - g
    const double sy = -step * (inner(g, g_new) - gg);
    const double ss = step * step * gg;
    step = sy > 0.0 ? ss / sy : 1.0;
    if (!std::isfinite(step) || step <= 0.0) step = 1.0;
    g = std::move(g_new);
  }

  report.iterations = it;
  report.u_star = std::move(u);
  report.weak_check = max_nodal_weak_residual(report.u_star, f, mu, e);
  return report;
}

double max_nodal_weak_residual(const GridFunction& u, const GridFunction& f,
                               const WeightField& mu, const Exponents& e) {
  double worst = 0.0;
  GridFunction phi(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k) {
    phi[k] = 1.0;
    worst = std::max(worst, std::abs(weak_residual(u, f, mu, e, phi)));
    phi[k] = 0.0;
  }
  return worst;
}

double verify_weak_form(const SolveReport& report, const GridFunction& f,
                        const WeightField& mu, const Exponents& e) {
  if (!report.converged)
    throw contract_error("verify_weak_form: report did not converge");
  return max_nodal_weak_residual(report.u_star, f, mu, e);
}

}  // namespace dphase
