// solver.hpp
//
// Minimization of the discrete double phase energy by steepest descent in
// the <.,.>_h metric with Barzilai-Borwein initial steps and Armijo
// backtracking. The minimizer is the discrete weak solution.

#ifndef DPHASE_SOLVER_HPP
#define DPHASE_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "dphase/double_phase.hpp"

namespace dphase {

struct SolverConfig {
  double tol_grad = 1e-6;
  int max_iters = 50000;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  std::optional<GridFunction> init;

  void check() const;

  /// tol_grad = 1e-8 for p = q = 2, 1e-6 otherwise.
  static SolverConfig defaults_for(const Exponents& e);
};

struct SolveReport {
  GridFunction u_star;
  int iterations = 0;
  double final_grad_norm = 0.0;
  /// Total energy before the first step and after each accepted step.
  std::vector<double> energy_trace;
  /// Exact energy change of each accepted step (all negative).
  std::vector<double> energy_decrements;
  double weak_check = 0.0;
  bool converged = false;
  bool stalled = false;
  std::string message;
};

/// J(u + t d) - J(u), evaluated edge by edge without cancellation against
/// the full energy.
double energy_change(const GridFunction& u, const GridFunction& direction,
                     double t, const GridFunction& f, const WeightField& mu,
                     const Exponents& e);

SolveReport solve_inner(const GridFunction& f, const WeightField& mu,
                        const Exponents& e, const SolverConfig& cfg);

/// max_k |weak_residual(u*, f, mu, e, indicator_k)| over the nodal test basis.
double max_nodal_weak_residual(const GridFunction& u, const GridFunction& f,
                               const WeightField& mu, const Exponents& e);

/// As max_nodal_weak_residual, rejecting non-converged reports.
double verify_weak_form(const SolveReport& report, const GridFunction& f,
                        const WeightField& mu, const Exponents& e);

}  // namespace dphase

#endif
