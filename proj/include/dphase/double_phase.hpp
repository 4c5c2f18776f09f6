// double_phase.hpp
//
// Discrete double phase energy
//
//   J(u) = (1/p) sum_i int |d_i u|^p + (1/q) sum_i int mu |d_i u|^q - int f u
//
// on the staggered grid of grid.hpp, with its exact gradient, the two
// strong-form operators (axis-separable "pseudo" form and the divergence
// form built on the Euclidean gradient), the weak-form residual and the
// Hessian action. Powers act on pi_eps(s) = sqrt(s^2 + eps^2).

#ifndef DPHASE_DOUBLE_PHASE_HPP
#define DPHASE_DOUBLE_PHASE_HPP

#include <optional>
#include <string>
#include <vector>

#include "dphase/grid.hpp"

namespace dphase {

inline constexpr double default_regularization = 1e-8;

enum class ExponentMode { strict, relaxed, quadratic };

std::string to_string(ExponentMode mode);
ExponentMode parse_exponent_mode(const std::string& text);

/// Growth exponents. `n` is the dimension entering the Sobolev relation
/// 1/p = 1/q - 1/n; it is independent of the grid dimension.
struct Exponents {
  double p = 2.0;
  double q = 2.0;
  int n = 2;
  double epsilon = 0.0;
  bool strict_sobolev = false;

  /// Throws contract_error unless q < p (or p = q = 2 for the quadratic
  /// reference configuration), p, q > 1, epsilon >= 0 with epsilon > 0 when
  /// min(p, q) < 2, and the Sobolev relation when strict_sobolev is set.
  void check() const;

  bool is_quadratic() const { return p == 2.0 && q == 2.0; }
};

/// strict:    p from 1/p = 1/q - 1/n, requires q < n.
/// relaxed:   p = *p_override, requires q < p.
/// quadratic: p = q = 2 (linear reference problem); q must be 2 if given.
Exponents validate_exponents(double q, int n, ExponentMode mode,
                             std::optional<double> p_override = std::nullopt,
                             double epsilon = default_regularization);

/// p = q = 2. The one configuration outside q < p that the core accepts.
Exponents quadratic_exponents(double epsilon = 0.0);

/// mu sampled at edge midpoints, one EdgeField per axis, 0 <= mu <= mu1.
class WeightField {
public:
  WeightField(std::vector<EdgeField> per_axis, double mu1);

  static WeightField constant(const Grid& grid, double mu0,
                              std::optional<double> mu1 = std::nullopt);

  /// mu(x, y) evaluated at each edge midpoint.
  template <typename Fn>
  static WeightField from_function(const Grid& grid, Fn&& fn, double mu1) {
    std::vector<EdgeField> fields;
    const int m = grid.per_axis();
    const double h = grid.spacing();
    const int transverse = grid.dim() == 1 ? 1 : m;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      EdgeField e(grid, axis);
      for (int t = 0; t < transverse; ++t)
        for (int j = 0; j <= m; ++j) {
          const double along = (j + 0.5) * h;
          const double across = (t + 1) * h;
          const double x = axis == 0 ? along : across;
          const double y = grid.dim() == 1 ? 0.0 : (axis == 0 ? across : along);
          e[e.index(j, t)] = fn(x, y);
        }
      fields.push_back(std::move(e));
    }
    return WeightField(std::move(fields), mu1);
  }

  /// Average of the two adjacent nodal values; an edge touching the
  /// boundary takes its single interior neighbour's value.
  static WeightField from_nodal(const GridFunction& mu, double mu1);

  /// mu0 * x: vanishes on {x = 0}, so both growth regimes are present.
  static WeightField ramp(const Grid& grid, double mu0);

  const Grid& grid() const { return fields_.front().grid(); }
  const EdgeField& axis(int i) const { return fields_.at(i); }
  double upper_bound() const { return mu1_; }

  /// max |mu(e) - mu(e')| / h over same-axis edges adjacent along either axis.
  double lipschitz_quotient() const;

private:
  std::vector<EdgeField> fields_;
  double mu1_;
};

struct EnergyBreakdown {
  double p_term = 0.0;
  double q_term = 0.0;
  double load_term = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const GridFunction& u, const GridFunction& f,
                       const WeightField& mu, const Exponents& e);

/// Gradient of `energy` in the <.,.>_h inner product:
/// apply_pseudo_operator(u) - f.
GridFunction energy_gradient(const GridFunction& u, const GridFunction& f,
                             const WeightField& mu, const Exponents& e);

/// -sum_i D_i^T (pi^{p-2} D_i u + mu pi^{q-2} D_i u)
GridFunction apply_pseudo_operator(const GridFunction& u, const WeightField& mu,
                                   const Exponents& e);

/// Same flux shape with pi evaluated at the Euclidean gradient magnitude;
/// the transverse component at an axis-i edge is the mean of the four
/// neighbouring transverse differences (ghost ones are zero).
GridFunction apply_divergence_operator(const GridFunction& u,
                                       const WeightField& mu,
                                       const Exponents& e);

/// sum_i quadrature(flux_i * D_i phi) - quadrature(f * phi)
double weak_residual(const GridFunction& u, const GridFunction& f,
                     const WeightField& mu, const Exponents& e,
                     const GridFunction& phi);

/// Per-edge second derivative of the edge energy density at u, one
/// EdgeField per axis. Throws singular_linearization when a coefficient
/// degenerates (zero or infinite) with epsilon = 0.
class singular_linearization : public contract_error {
public:
  using contract_error::contract_error;
};

struct Linearization {
  std::vector<EdgeField> coefficients;

  GridFunction apply(const GridFunction& w) const;
  double min_coefficient() const;
};

Linearization linearize(const GridFunction& u, const WeightField& mu,
                        const Exponents& e);

/// sum_i D_i^T diag(a_i) D_i w
GridFunction hessian_apply(const GridFunction& u, const GridFunction& w,
                           const WeightField& mu, const Exponents& e);

}  // namespace dphase

#endif
