// control.hpp
//
// Reduced-space optimal control of the pseudo double phase problem:
//
//   min_f  E(f, u)   subject to   u = psi(f),
//
// where psi(f) minimizes the discrete energy. Derivatives of psi come from
// the linearized state equation; the reduced gradient uses a single adjoint
// solve since the Hessian is self-adjoint.

#ifndef DPHASE_CONTROL_HPP
#define DPHASE_CONTROL_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dphase/solver.hpp"

namespace dphase {

struct Objective {
  std::function<double(const GridFunction& f, const GridFunction& u)> evaluate;
  /// Gradients in the <.,.>_h inner product.
  std::function<GridFunction(const GridFunction& f, const GridFunction& u)> grad_u;
  std::function<GridFunction(const GridFunction& f, const GridFunction& u)> grad_f;
};

/// E(f, u) = 1/2 |u - u_d|_h^2 + alpha/2 |f|_h^2
Objective tracking_objective(GridFunction u_desired, double alpha);

struct ObjectiveSelfTest {
  double worst_u = 0.0;  // max relative error of <grad_u, w>_h vs central FD
  double worst_f = 0.0;
  bool passed = false;
};

/// Random probes (f, u, direction) of unit scale. Each directional derivative
/// is compared with central differences at steps 1e-2 ... 1e-6 and the best
/// agreement counts, so neither truncation nor cancellation against a large
/// objective value can fail a correct gradient. Errors are relative to
/// max(|<grad, w>|, |grad| |w|).
ObjectiveSelfTest self_test(const Objective& obj, const Grid& grid,
                            std::uint64_t seed, int probes = 4,
                            double tol = 1e-6);

struct ControlConfig {
  SolverConfig inner;
  double tol_reduced = 1e-5;
  int max_outer = 1000;
  double cg_tol = 1e-10;
  int cg_max = 5000;
  double alpha = 1e-6;
  double armijo_c = 1e-4;
  double backtrack = 0.5;

  void check() const;
};

struct ControlReport {
  GridFunction f_star;
  GridFunction u_star;
  int outer_iters = 0;
  std::vector<double> objective_trace;
  double stationarity = 0.0;
  int inner_solves = 0;
  bool converged = false;
  std::string message;
};

struct CgResult {
  GridFunction x;
  int iterations = 0;
  double residual = 0.0;  // |r|_h / |b|_h
  bool converged = false;
};

/// Matrix-free CG for lin.apply(x) = b in the <.,.>_h inner product.
/// Throws numerical_error on non-positive curvature.
CgResult conjugate_gradient(const Linearization& lin, const GridFunction& b,
                            double rel_tol, int max_iters);

/// psi with a content-hash cache. One instance serves one outer run; cached
/// reports are shared and immutable, lookups take a shared lock.
class SolutionOperator {
public:
  SolutionOperator(WeightField mu, Exponents e, SolverConfig cfg,
                   bool use_cache = true);

  /// Converged report for f; throws numerical_error otherwise. `warm`
  /// overrides the configured initial guess on a cache miss.
  std::shared_ptr<const SolveReport> solve(const GridFunction& f,
                                           const GridFunction* warm = nullptr);

  GridFunction operator()(const GridFunction& f) { return solve(f)->u_star; }

  const WeightField& weight() const { return mu_; }
  const Exponents& exponents() const { return e_; }
  int solves() const { return solves_; }
  int cache_hits() const { return hits_; }

private:
  WeightField mu_;
  Exponents e_;
  SolverConfig cfg_;
  bool use_cache_;
  struct Entry {
    std::vector<double> f;
    std::shared_ptr<const SolveReport> report;
  };

  std::atomic<int> solves_ = 0;
  std::atomic<int> hits_ = 0;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> cache_;
};

std::uint64_t content_hash(const GridFunction& f);

GridFunction solution_operator(const GridFunction& f, const WeightField& mu,
                               const Exponents& e, const SolverConfig& cfg);

/// Directional derivative psi'(f) h: solves H(psi(f)) w = h.
GridFunction gateaux_derivative(const GridFunction& f, const GridFunction& h,
                                const WeightField& mu, const Exponents& e,
                                const ControlConfig& cfg);
GridFunction gateaux_derivative(SolutionOperator& psi, const GridFunction& f,
                                const GridFunction& h, const ControlConfig& cfg);

/// grad_f E + lambda with H(psi(f)) lambda = grad_u E.
GridFunction reduced_gradient(const GridFunction& f, const Objective& obj,
                              const WeightField& mu, const Exponents& e,
                              const ControlConfig& cfg);
GridFunction reduced_gradient(SolutionOperator& psi, const GridFunction& f,
                              const Objective& obj, const ControlConfig& cfg);

/// Reduced-gradient descent on f with BB initial steps and Armijo
/// backtracking; inner solves warm-start from the last accepted state.
ControlReport optimize_control(const Objective& obj, const GridFunction& f0,
                               const WeightField& mu, const Exponents& e,
                               const ControlConfig& cfg);

}  // namespace dphase

#endif
