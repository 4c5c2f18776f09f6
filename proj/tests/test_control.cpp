#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "dphase/control.hpp"
#include "support.hpp"

using namespace dphase;
using dphase::testing::random_field;
using dphase::testing::relative_error;

namespace {

Exponents general() {
  return validate_exponents(4.0 / 3.0, 2, ExponentMode::strict, std::nullopt, 1e-6);
}

ControlConfig tight(const Exponents& e) {
  ControlConfig cfg;
  cfg.inner = SolverConfig::defaults_for(e);
  cfg.inner.tol_grad = 1e-11;
  cfg.inner.max_iters = 500000;
  cfg.cg_tol = 1e-12;
  return cfg;
}

double l2(const GridFunction& u) { return std::sqrt(inner(u, u)); }

}  // namespace

TEST_CASE("tracking objective passes its self-test") {
  const Grid g = build_grid(2, 5);
  std::mt19937_64 rng(1);
  for (double alpha : {0.0, 1e-6, 1.0}) {
    const ObjectiveSelfTest st = self_test(tracking_objective(random_field(g, rng), alpha), g, 3);
    CHECK(st.passed);
    CHECK(st.worst_u <= 1e-6);
    CHECK(st.worst_f <= 1e-6);
  }
}

TEST_CASE("a wrong gradient fails the self-test and blocks optimization") {
  const Grid g = build_grid(2, 5);
  Objective obj = tracking_objective(GridFunction(g), 1.0);
  obj.grad_f = [](const GridFunction& f, const GridFunction&) { return 2.0 * f; };
  CHECK_FALSE(self_test(obj, g, 3).passed);
  const Exponents e = quadratic_exponents();
  CHECK_THROWS_AS(optimize_control(obj, GridFunction(g), WeightField::constant(g, 1.0), e,
                                   tight(e)),
                  contract_error);
}

TEST_CASE("control config validation") {
  ControlConfig cfg;
  CHECK_NOTHROW(cfg.check());
  cfg.cg_tol = cfg.tol_reduced;
  CHECK_THROWS_AS(cfg.check(), contract_error);
  cfg = ControlConfig{};
  cfg.tol_reduced = 0.0;
  CHECK_THROWS_AS(cfg.check(), contract_error);
  cfg = ControlConfig{};
  cfg.cg_max = 0;
  CHECK_THROWS_AS(cfg.check(), contract_error);
}

TEST_CASE("conjugate gradient") {
  const Grid g = build_grid(2, 7);
  std::mt19937_64 rng(5);
  const GridFunction u = random_field(g, rng);
  const Linearization lin = linearize(u, WeightField::ramp(g, 1.0), general());
  const GridFunction b = random_field(g, rng);
  const CgResult r = conjugate_gradient(lin, b, 1e-12, 5000);
  CHECK(r.converged);
  CHECK(l2(lin.apply(r.x) - b) <= 1e-11 * l2(b));

  const CgResult zero = conjugate_gradient(lin, GridFunction(g), 1e-12, 10);
  CHECK(zero.converged);
  CHECK(zero.iterations == 0);
  CHECK(max_norm(zero.x) == 0.0);

  const CgResult capped = conjugate_gradient(lin, b, 1e-12, 2);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 2);

  Linearization negative = lin;
  for (EdgeField& a : negative.coefficients)
    for (double& v : a.values()) v = -v;
  CHECK_THROWS_AS(conjugate_gradient(negative, b, 1e-12, 100), numerical_error);
}

TEST_CASE("content hash") {
  const Grid g = build_grid(2, 4);
  std::mt19937_64 rng(9);
  const GridFunction a = random_field(g, rng);
  GridFunction b = a;
  CHECK(content_hash(a) == content_hash(b));
  b[3] = std::nextafter(b[3], 1e300);
  CHECK(content_hash(a) != content_hash(b));
}

TEST_CASE("solution operator") {
  const Grid g = build_grid(2, 7);
  const Exponents e = general();
  const WeightField mu = WeightField::ramp(g, 1.0);
  SolverConfig cfg;
  cfg.tol_grad = 1e-9;
  SolutionOperator psi(mu, e, cfg);

  CHECK(max_norm(psi(GridFunction(g))) <= 1e-8);

  std::mt19937_64 rng(12);
  const GridFunction f = random_field(g, rng);
  const auto first = psi.solve(f);
  const int solves = psi.solves();
  const auto second = psi.solve(f);
  CHECK(first == second);
  CHECK(psi.solves() == solves);
  CHECK(psi.cache_hits() == 1);

  const GridFunction uncached = solution_operator(f, mu, e, cfg);
  CHECK(uncached == first->u_star);
  SolverConfig warm_cfg = cfg;
  warm_cfg.init = random_field(g, rng, 0.01);
  const GridFunction other = solution_operator(f, mu, e, warm_cfg);
  CHECK(sobolev_norm(other - first->u_star, e.p) <= 1e-6);

  SUBCASE("concurrent lookups") {
    std::vector<std::thread> pool;
    std::vector<std::shared_ptr<const SolveReport>> got(4);
    for (int i = 0; i < 4; ++i) pool.emplace_back([&, i] { got[i] = psi.solve(f); });
    for (std::thread& t : pool) t.join();
    for (const auto& r : got) CHECK(r == first);
  }

  SUBCASE("non-convergence surfaces as a numerical error") {
    SolverConfig capped = cfg;
    capped.max_iters = 2;
    SolutionOperator short_psi(mu, e, capped);
    CHECK_THROWS_AS(short_psi.solve(f), numerical_error);
  }
}

TEST_CASE("quadratic solution operator is linear") {
  const Grid g = build_grid(2, 7);
  const Exponents e = quadratic_exponents();
  const WeightField mu = WeightField::constant(g, 1.0);
  const ControlConfig cfg = tight(e);
  std::mt19937_64 rng(13);
  const GridFunction f1 = random_field(g, rng);
  const GridFunction f2 = random_field(g, rng);
  const GridFunction lhs = solution_operator(f1 + f2, mu, e, cfg.inner);
  const GridFunction rhs = solution_operator(f1, mu, e, cfg.inner) +
                           solution_operator(f2, mu, e, cfg.inner);
  CHECK(max_norm(lhs - rhs) <= 1e-9 * max_norm(lhs));

  // derivative of a linear map is the map itself
  const GridFunction w = gateaux_derivative(f1, f2, mu, e, cfg);
  CHECK(max_norm(w - solution_operator(f2, mu, e, cfg.inner)) <= 1e-9 * max_norm(w));
}

TEST_CASE("gateaux derivative") {
  const Grid g = build_grid(2, 7);
  const Exponents e = general();
  const WeightField mu = WeightField::ramp(g, 1.0);
  const ControlConfig cfg = tight(e);
  SolutionOperator psi(mu, e, cfg.inner);
  std::mt19937_64 rng(14);
  const GridFunction f = GridFunction::constant(g, 1.0) + random_field(g, rng, 0.5);

  CHECK(max_norm(gateaux_derivative(psi, f, GridFunction(g), cfg)) == 0.0);

  const GridFunction h1 = random_field(g, rng);
  const GridFunction h2 = random_field(g, rng);
  const GridFunction w1 = gateaux_derivative(psi, f, h1, cfg);
  const GridFunction w2 = gateaux_derivative(psi, f, h2, cfg);
  const GridFunction w12 = gateaux_derivative(psi, f, 2.0 * h1 - 3.0 * h2, cfg);
  CHECK(max_norm(w12 - (2.0 * w1 - 3.0 * w2)) <= 1e-9 * max_norm(w12));

  const double t = 1e-5;
  const GridFunction u0 = psi(f);
  const GridFunction fd = (1.0 / t) * (psi(f + t * h1) - u0);
  CHECK(l2(fd - w1) <= 1e-3 * l2(w1));
}

TEST_CASE("reduced gradient") {
  const Grid g = build_grid(2, 7);
  const Exponents e = general();
  const WeightField mu = WeightField::ramp(g, 1.0);
  const ControlConfig cfg = tight(e);
  SolutionOperator psi(mu, e, cfg.inner);
  std::mt19937_64 rng(15);
  const GridFunction f = GridFunction::constant(g, 1.0) + random_field(g, rng, 0.5);

  SUBCASE("objective without state dependence") {
    Objective obj;
    obj.evaluate = [](const GridFunction& f, const GridFunction&) { return inner(f, f); };
    obj.grad_u = [](const GridFunction&, const GridFunction& u) { return GridFunction(u.grid()); };
    obj.grad_f = [](const GridFunction& f, const GridFunction&) { return 2.0 * f; };
    CHECK(reduced_gradient(psi, f, obj, cfg) == 2.0 * f);
  }

  SUBCASE("perfect fit is stationary") {
    const Objective obj = tracking_objective(psi(f), 0.0);
    CHECK(max_norm(reduced_gradient(psi, f, obj, cfg)) <= 1e-12);
  }

  SUBCASE("finite differences of the reduced objective") {
    const Objective obj =
        tracking_objective(psi(GridFunction::constant(g, 2.0)), 1e-6);
    const GridFunction grad = reduced_gradient(psi, f, obj, cfg);
    for (int k = 0; k < 3; ++k) {
      const GridFunction d = random_field(g, rng);
      auto reduced = [&](double t) {
        const GridFunction ft = f + t * d;
        return obj.evaluate(ft, psi(ft));
      };
      const double fd = testing::central_difference(reduced, 1e-3);
      CHECK(relative_error(fd, inner(grad, d)) <= 1e-4);
    }
  }
}

TEST_CASE("optimize_control") {
  const Grid g = build_grid(2, 7);
  const Exponents e = quadratic_exponents();
  const WeightField mu = WeightField::constant(g, 1.0);
  ControlConfig cfg = tight(e);
  cfg.tol_reduced = 1e-7;
  const GridFunction fhat = GridFunction::sample(
      g, [](double x, double y) { return 1.0 + 4.0 * x * y + (x < 0.5 ? 2.0 : -1.0); });
  const GridFunction ud = solution_operator(fhat, mu, e, cfg.inner);

  SUBCASE("tracking instance") {
    const Objective obj = tracking_objective(ud, cfg.alpha);
    const ControlReport r = optimize_control(obj, GridFunction(g), mu, e, cfg);
    CHECK(r.converged);
    CHECK(r.stationarity <= cfg.tol_reduced);
    CHECK(r.objective_trace.back() <= obj.evaluate(fhat, ud) + 1e-8);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
    CHECK(r.outer_iters + 1 == static_cast<int>(r.objective_trace.size()));
  }

  SUBCASE("stationary start takes no steps") {
    const Objective obj = tracking_objective(ud, 0.0);
    ControlConfig c0 = cfg;
    c0.alpha = 0.0;
    const ControlReport r = optimize_control(obj, fhat, mu, e, c0);
    CHECK(r.converged);
    CHECK(r.outer_iters == 0);
    CHECK(r.f_star == fhat);
  }

  SUBCASE("strong regularization drives the control to zero") {
    const double alpha = 1e6;
    const Objective obj = tracking_objective(ud, alpha);
    cfg.alpha = alpha;
    const ControlReport r = optimize_control(obj, GridFunction(g), mu, e, cfg);
    CHECK(r.converged);
    SolutionOperator psi(mu, e, cfg.inner);
    const Objective data = tracking_objective(ud, 0.0);
    const double bound = l2(reduced_gradient(psi, GridFunction(g), data, cfg)) / alpha;
    CHECK(l2(r.f_star) <= bound * (1.0 + 1e-6));
  }

  SUBCASE("iteration cap is flagged") {
    cfg.max_outer = 1;
    const ControlReport r =
        optimize_control(tracking_objective(ud, cfg.alpha), GridFunction(g), mu, e, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.outer_iters == 1);
    CHECK_FALSE(r.message.empty());
  }
}
