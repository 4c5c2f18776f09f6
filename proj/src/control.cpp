#include "dphase/control.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <random>

#include <fmt/format.h>

namespace dphase {

Objective tracking_objective(GridFunction u_desired, double alpha) {
  if (!(alpha >= 0.0)) throw contract_error("tracking objective: alpha must be >= 0");
  auto ud = std::make_shared<const GridFunction>(std::move(u_desired));
  Objective obj;
  obj.evaluate = [ud, alpha](const GridFunction& f, const GridFunction& u) {
    const GridFunction r = u - *ud;
    return 0.5 * inner(r, r) + 0.5 * alpha * inner(f, f);
  };
  obj.grad_u = [ud](const GridFunction&, const GridFunction& u) { return u - *ud; };
  obj.grad_f = [alpha](const GridFunction& f, const GridFunction&) {
    return alpha * f;
  };
  return obj;
}

ObjectiveSelfTest self_test(const Objective& obj, const Grid& grid,
                            std::uint64_t seed, int probes, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_field = [&] {
    GridFunction g(grid);
    for (double& v : g.values()) v = gauss(rng);
    return g;
  };
  // error relative to the derivative, or to |grad| |w| when the direction is
  // nearly orthogonal to the gradient
  auto best = [&](auto&& along, const GridFunction& grad, const GridFunction& w) {
    const double exact = inner(grad, w);
    const double scale = std::max(std::abs(exact), std::sqrt(inner(grad, grad) * inner(w, w)));
    double err = std::numeric_limits<double>::infinity();
    for (double step : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const double fd = (along(step) - along(-step)) / (2.0 * step);
      err = std::min(err, std::abs(fd - exact) / std::max({scale, std::abs(fd), 1e-300}));
    }
    return err;
  };

  ObjectiveSelfTest out;
  for (int i = 0; i < probes; ++i) {
    const GridFunction f = random_field();
    const GridFunction u = random_field();
    const GridFunction w = random_field();
    const double eu =
        best([&](double t) { return obj.evaluate(f, u + t * w); }, obj.grad_u(f, u), w);
    const double ef =
        best([&](double t) { return obj.evaluate(f + t * w, u); }, obj.grad_f(f, u), w);
    out.worst_u = std::max(out.worst_u, eu);
    out.worst_f = std::max(out.worst_f, ef);
  }
  out.passed = out.worst_u <= tol && out.worst_f <= tol;
  return out;
}

void ControlConfig::check() const {
  inner.check();
  if (!(tol_reduced > 0.0)) throw contract_error("control: tol_reduced must be > 0");
  if (!(cg_tol > 0.0)) throw contract_error("control: cg_tol must be > 0");
  if (!(cg_tol < tol_reduced))
    throw contract_error("control: cg_tol must be smaller than tol_reduced");
  if (max_outer < 0) throw contract_error("control: max_outer must be >= 0");
  if (cg_max < 1) throw contract_error("control: cg_max must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw contract_error("control: armijo_c must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw contract_error("control: backtrack must lie in (0, 1)");
}

CgResult conjugate_gradient(const Linearization& lin, const GridFunction& b,
                            double rel_tol, int max_iters) {
  CgResult out{.x = GridFunction(b.grid())};
  const double bnorm = std::sqrt(inner(b, b));
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  GridFunction r = b;
  GridFunction p = r;
  double rr = inner(r, r);
  for (int it = 0; it < max_iters; ++it) {
    out.residual = std::sqrt(rr) / bnorm;
    if (out.residual <= rel_tol) {
      out.converged = true;
      out.iterations = it;
      return out;
    }
    const GridFunction hp = lin.apply(p);
    const double curvature = inner(p, hp);
    if (!(curvature > 0.0))
      throw numerical_error(
          "conjugate gradient: non-positive curvature; the linearization needs "
          "more regularization");
    const double a = rr / curvature;
    out.x.axpy(a, p);
    r.axpy(-a, hp);
    const double rr_new = inner(r, r);
    p *= rr_new / rr;
    p += r;
    rr = rr_new;
  }
  out.residual = std::sqrt(rr) / bnorm;
  out.converged = out.residual <= rel_tol;
  out.iterations = max_iters;
  return out;
}

namespace {

GridFunction cg_solve(const Linearization& lin, const GridFunction& b,
                      const ControlConfig& cfg, const char* what) {
  CgResult r = conjugate_gradient(lin, b, cfg.cg_tol, cfg.cg_max);
  if (!r.converged)
    throw numerical_error(fmt::format(
        "{}: conjugate gradient stopped at relative residual {:.3e} after {} "
        "iterations",
        what, r.residual, r.iterations));
  return std::move(r.x);
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t content_hash(const GridFunction& f) {
  // FNV-1a over the raw bytes
  std::uint64_t h = 1469598103934665603ull;
  for (double v : f.values()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

SolutionOperator::SolutionOperator(WeightField mu, Exponents e, SolverConfig cfg,
                                   bool use_cache)
    : mu_(std::move(mu)), e_(e), cfg_(std::move(cfg)), use_cache_(use_cache) {
  e_.check();
  cfg_.check();
}

std::shared_ptr<const SolveReport> SolutionOperator::solve(const GridFunction& f,
                                                           const GridFunction* warm) {
  const std::uint64_t key = content_hash(f);
  if (use_cache_) {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end())
      for (const Entry& entry : it->second)
        if (std::equal(entry.f.begin(), entry.f.end(), f.values().begin(),
                       f.values().end())) {
          ++hits_;
          return entry.report;
        }
  }

  SolverConfig cfg = cfg_;
  if (warm) cfg.init = *warm;
  auto report = std::make_shared<const SolveReport>(solve_inner(f, mu_, e_, cfg));
  ++solves_;
  if (!report->converged)
    throw numerical_error(fmt::format(
        "solution operator: inner solve did not converge ({}; gradient norm "
        "{:.3e} after {} iterations)",
        report->message, report->final_grad_norm, report->iterations));

  if (use_cache_) {
    std::unique_lock lock(mutex_);
    cache_[key].push_back({{f.values().begin(), f.values().end()}, report});
  }
  return report;
}

GridFunction solution_operator(const GridFunction& f, const WeightField& mu,
                               const Exponents& e, const SolverConfig& cfg) {
  SolutionOperator psi(mu, e, cfg, false);
  return psi(f);
}

GridFunction gateaux_derivative(SolutionOperator& psi, const GridFunction& f,
                                const GridFunction& h, const ControlConfig& cfg) {
  require_same_grid(f.grid(), h.grid(), "gateaux_derivative");
  const auto state = psi.solve(f);
  const Linearization lin = linearize(state->u_star, psi.weight(), psi.exponents());
  return cg_solve(lin, h, cfg, "gateaux_derivative");
}

GridFunction gateaux_derivative(const GridFunction& f, const GridFunction& h,
                                const WeightField& mu, const Exponents& e,
                                const ControlConfig& cfg) {
  cfg.check();
  SolutionOperator psi(mu, e, cfg.inner);
  return gateaux_derivative(psi, f, h, cfg);
}

namespace {

GridFunction reduced_gradient_at(const Linearization& lin, const GridFunction& f,
                                 const GridFunction& u, const Objective& obj,
                                 const ControlConfig& cfg) {
  GridFunction g = obj.grad_f(f, u);
  g += cg_solve(lin, obj.grad_u(f, u), cfg, "reduced_gradient");
  return g;
}

}  // namespace

GridFunction reduced_gradient(SolutionOperator& psi, const GridFunction& f,
                              const Objective& obj, const ControlConfig& cfg) {
  const auto state = psi.solve(f);
  const Linearization lin = linearize(state->u_star, psi.weight(), psi.exponents());
  return reduced_gradient_at(lin, f, state->u_star, obj, cfg);
}

GridFunction reduced_gradient(const GridFunction& f, const Objective& obj,
                              const WeightField& mu, const Exponents& e,
                              const ControlConfig& cfg) {
  cfg.check();
  SolutionOperator psi(mu, e, cfg.inner);
  return reduced_gradient(psi, f, obj, cfg);
}

ControlReport optimize_control(const Objective& obj, const GridFunction& f0,
                               const WeightField& mu, const Exponents& e,
                               const ControlConfig& cfg) {
  cfg.check();
  const ObjectiveSelfTest st = self_test(obj, f0.grid(), 0);
  if (!st.passed)
    throw contract_error(fmt::format(
        "control: objective self-test failed (grad_u error {:.3e}, grad_f error "
        "{:.3e})",
        st.worst_u, st.worst_f));

  SolutionOperator psi(mu, e, cfg.inner);
  GridFunction f = f0;
  auto state = psi.solve(f);
  double value = obj.evaluate(f, state->u_star);
  GridFunction g = reduced_gradient(psi, f, obj, cfg);

  ControlReport report{.f_star = f, .u_star = state->u_star, .objective_trace = {}, .message = {}};
  report.objective_trace.push_back(value);
  double step = 1.0;
  int it = 0;
  for (;; ++it) {
    report.stationarity = max_norm(g);
    if (report.stationarity <= cfg.tol_reduced) {
      report.converged = true;
      break;
    }
    if (it >= cfg.max_outer) {
      report.message = fmt::format("outer iteration cap {} reached", cfg.max_outer);
      break;
    }

    const double gg = inner(g, g);
    bool accepted = false;
    GridFunction f_trial = f;
    std::shared_ptr<const SolveReport> trial;
    double trial_value = 0.0;
    while (step >= 1e-16) {
      f_trial = f;
      f_trial.axpy(-step, g);
      try {
        trial = psi.solve(f_trial, &state->u_star);
      } catch (const numerical_error&) {
        step *= cfg.backtrack;
        continue;
      }
      trial_value = obj.evaluate(f_trial, trial->u_star);
      if (trial_value <= value - cfg.armijo_c * step * gg) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      report.message = "outer line search stalled (step below 1e-16)";
      break;
    }

    GridFunction g_new = reduced_gradient(psi, f_trial, obj, cfg);
    const double sy = -step * (inner(g, g_new) - gg);
    const double ss = step * step * gg;
    step = sy > 0.0 ? ss / sy : 1.0;
    if (!std::isfinite(step) || step <= 0.0) step = 1.0;

    f = std::move(f_trial);
    state = std::move(trial);
    value = trial_value;
    g = std::move(g_new);
    report.objective_trace.push_back(value);
  }

  report.outer_iters = it;
  report.f_star = f;
  report.u_star = state->u_star;
  report.inner_solves = psi.solves();
  return report;
}

}  // namespace dphase
