#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dphase/grid.hpp"
#include "support.hpp"

using namespace dphase;
using dphase::testing::random_field;

TEST_CASE("build_grid") {
  const Grid g1 = build_grid(1, 1);
  CHECK(g1.node_count() == 1);
  CHECK(g1.spacing() == 0.5);

  const Grid g2 = build_grid(2, 3);
  CHECK(g2.node_count() == 9);
  CHECK(g2.spacing() == 0.25);
  CHECK(g2.edge_count(0) == 12);
  CHECK(g2.edge_count(1) == 12);

  CHECK_THROWS_AS(build_grid(3, 4), contract_error);
  CHECK_THROWS_AS(build_grid(0, 4), contract_error);
  CHECK_THROWS_AS(build_grid(1, 0), contract_error);
  CHECK_THROWS_AS(g2.edge_count(2), contract_error);
}

TEST_CASE("grid function storage and ghost boundary") {
  const Grid g = build_grid(2, 3);
  GridFunction u = GridFunction::sample(g, [](double x, double y) { return x + 10 * y; });
  CHECK(u.size() == 9);
  // lexicographic: first axis slowest
  CHECK(u[g.node_index({0, 1})] == doctest::Approx(0.25 + 5.0));
  CHECK(u.at(1, 2) == doctest::Approx(0.5 + 7.5));
  CHECK(u.at(-1, 0) == 0.0);
  CHECK(u.at(3, 0) == 0.0);
  CHECK(u.at(0, -1) == 0.0);
  CHECK(u.at(0, 3) == 0.0);

  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(4)), contract_error);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(9, NAN)), contract_error);
  CHECK_THROWS_AS(u += GridFunction(build_grid(2, 4)), contract_error);
}

TEST_CASE("forward_diff") {
  SUBCASE("hand example") {
    const Grid g = build_grid(1, 1);
    const EdgeField d = forward_diff(GridFunction(g, {1.0}), 0);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 2.0);
    CHECK(d[1] == -2.0);
  }
  SUBCASE("zero field") {
    const Grid g = build_grid(2, 4);
    for (int a = 0; a < 2; ++a) {
      const EdgeField d = forward_diff(GridFunction(g), a);
      for (double v : d.values()) CHECK(v == 0.0);
    }
  }
  SUBCASE("linearity") {
    const Grid g = build_grid(2, 5);
    std::mt19937_64 rng(3);
    const GridFunction v = random_field(g, rng);
    const double c = -2.75;
    for (int a = 0; a < 2; ++a) {
      const EdgeField dv = forward_diff(v, a);
      const EdgeField dcv = forward_diff(c * v, a);
      for (std::size_t k = 0; k < dv.size(); ++k)
        CHECK(dcv[k] == doctest::Approx(c * dv[k]).epsilon(1e-14));
    }
  }
  SUBCASE("2-D boundary edges see ghost zeros") {
    const Grid g = build_grid(2, 2);
    const GridFunction u = GridFunction::constant(g, 1.0);
    const EdgeField dx = forward_diff(u, 0);
    const EdgeField dy = forward_diff(u, 1);
    const double inv_h = 1.0 / g.spacing();
    for (int t = 0; t < 2; ++t) {
      CHECK(dx[dx.index(0, t)] == inv_h);
      CHECK(dx[dx.index(1, t)] == 0.0);
      CHECK(dx[dx.index(2, t)] == -inv_h);
      CHECK(dy[dy.index(0, t)] == inv_h);
      CHECK(dy[dy.index(2, t)] == -inv_h);
    }
  }
  SUBCASE("axis out of range") {
    CHECK_THROWS_AS(forward_diff(GridFunction(build_grid(1, 3)), 1), contract_error);
  }
}

TEST_CASE("quadrature") {
  const Grid g = build_grid(2, 3);
  CHECK(quadrature(GridFunction::constant(g, 1.0)) == doctest::Approx(0.5625));
  CHECK(quadrature(GridFunction(g)) == 0.0);
  std::mt19937_64 rng(5);
  const GridFunction u = random_field(g, rng);
  CHECK(quadrature(3.5 * u) == doctest::Approx(3.5 * quadrature(u)));
  // edge rule: (m+1)*m edges of weight h^2
  CHECK(quadrature(EdgeField(g, 0, std::vector<double>(12, 1.0))) ==
        doctest::Approx(12 * 0.0625));
}

TEST_CASE("sobolev_norm") {
  const Grid g1 = build_grid(1, 1);
  CHECK(sobolev_norm(GridFunction(g1), 2.0) == 0.0);
  CHECK(sobolev_norm(GridFunction(g1, {1.0}), 2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(sobolev_norm(GridFunction(g1), 0.5), contract_error);

  const Grid g = build_grid(2, 6);
  std::mt19937_64 rng(11);
  for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0}) {
    const GridFunction u = random_field(g, rng);
    const GridFunction w = random_field(g, rng);
    CHECK(sobolev_norm(-3.0 * u, p) == doctest::Approx(3.0 * sobolev_norm(u, p)));
    CHECK(sobolev_norm(u + w, p) <= sobolev_norm(u, p) + sobolev_norm(w, p) + 1e-12);
    CHECK(sobolev_norm(u, p) > 0.0);
  }
}

TEST_CASE("summation by parts is exact") {
  std::mt19937_64 rng(17);
  for (int n : {1, 2}) {
    const Grid g = build_grid(n, 7);
    for (int rep = 0; rep < 5; ++rep) {
      const GridFunction u = random_field(g, rng);
      const GridFunction w = random_field(g, rng);
      for (int a = 0; a < n; ++a) {
        EdgeField prod = forward_diff(u, a);
        const EdgeField dw = forward_diff(w, a);
        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] *= dw[k];
        const double lhs = quadrature(prod);
        const double rhs = inner(w, negative_second_difference(u, a));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs) + 1e-12);
      }
    }
  }
}

TEST_CASE("negative second difference matches the 3-point stencil") {
  const Grid g = build_grid(1, 5);
  std::mt19937_64 rng(2);
  const GridFunction u = random_field(g, rng);
  const GridFunction lu = negative_second_difference(u, 0);
  const double h2 = g.spacing() * g.spacing();
  for (int i = 0; i < 5; ++i)
    CHECK(lu[i] == doctest::Approx((2 * u.at(i) - u.at(i - 1) - u.at(i + 1)) / h2));
}

TEST_CASE("sobolev_norm converges under refinement") {
  // |sin(pi x)'|_{L^2} = pi / sqrt(2)
  const double exact = std::numbers::pi / std::sqrt(2.0);
  double previous = INFINITY;
  for (int m : {7, 15, 31, 63, 127}) {
    const Grid g = build_grid(1, m);
    const GridFunction u = GridFunction::sample(
        g, [](double x, double) { return std::sin(std::numbers::pi * x); });
    const double err = std::abs(sobolev_norm(u, 2.0) - exact);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-3);
}
