// Shared helpers for the test binaries: seeded random fields and the
// finite-difference oracles the derivative checks compare against.

#ifndef DPHASE_TESTS_SUPPORT_HPP
#define DPHASE_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "dphase/double_phase.hpp"

namespace dphase::testing {

inline GridFunction random_field(const Grid& grid, std::mt19937_64& rng,
                                 double scale = 1.0) {
  std::normal_distribution<double> gauss;
  GridFunction g(grid);
  for (double& v : g.values()) v = scale * gauss(rng);
  return g;
}

inline WeightField random_weight(const Grid& grid, std::mt19937_64& rng,
                                 double mu1 = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, mu1);
  std::vector<EdgeField> fields;
  for (int a = 0; a < grid.dim(); ++a) {
    EdgeField e(grid, a);
    for (double& v : e.values()) v = unit(rng);
    fields.push_back(std::move(e));
  }
  return WeightField(std::move(fields), mu1);
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// d/dt F(x + t w) at t = 0 by central differences.
template <typename Fn>
double central_difference(Fn&& F, double step) {
  return (F(step) - F(-step)) / (2.0 * step);
}

inline double relative_l2_gap(const GridFunction& a, const GridFunction& b) {
  const GridFunction d = a - b;
  return std::sqrt(inner(d, d) / inner(a, a));
}

}  // namespace dphase::testing

#endif
