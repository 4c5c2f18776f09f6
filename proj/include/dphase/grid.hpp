// grid.hpp
//
// Uniform tensor grid on the unit square/interval with homogeneous Dirichlet
// data, nodal grid functions, staggered edge fields, and the discrete
// difference/quadrature/norm operators built on them.

#ifndef DPHASE_GRID_HPP
#define DPHASE_GRID_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "dphase/errors.hpp"

namespace dphase {

/// Interior nodes of (0,1)^n, m per axis, spacing h = 1/(m+1).
/// Boundary nodes carry u = 0 and are never stored.
class Grid {
public:
  Grid(int n, int m);

  int dim() const { return n_; }
  int per_axis() const { return m_; }
  double spacing() const { return h_; }

  /// m^n
  std::size_t node_count() const { return node_count_; }

  /// Number of edges along `axis`: (m+1) along the axis times m per other axis.
  std::size_t edge_count(int axis) const;

  /// h^n, the cell volume used by every quadrature.
  double cell_volume() const { return cell_volume_; }

  /// Lexicographic node index: the first axis varies slowest.
  std::size_t node_index(std::array<int, 2> idx) const {
    return n_ == 1 ? static_cast<std::size_t>(idx[0])
                   : static_cast<std::size_t>(idx[0]) * m_ + idx[1];
  }
  std::array<int, 2> node_multi_index(std::size_t k) const {
    if (n_ == 1) return {static_cast<int>(k), 0};
    return {static_cast<int>(k / m_), static_cast<int>(k % m_)};
  }
  /// Coordinate of interior node k along `axis`.
  double coordinate(std::size_t k, int axis) const {
    return (node_multi_index(k)[axis] + 1) * h_;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.m_ == b.m_;
  }

private:
  int n_;
  int m_;
  double h_;
  double cell_volume_;
  std::size_t node_count_;
};

/// build_grid(n, m) with the module's validation.
Grid build_grid(int n, int m);

/// Nodal values on the interior nodes.
class GridFunction {
public:
  explicit GridFunction(const Grid& grid);
  GridFunction(const Grid& grid, std::vector<double> values);

  static GridFunction constant(const Grid& grid, double value);

  template <typename Fn>
  static GridFunction sample(const Grid& grid, Fn&& fn) {
    GridFunction g(grid);
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      const double x = grid.coordinate(k, 0);
      const double y = grid.dim() == 2 ? grid.coordinate(k, 1) : 0.0;
      g.values_[k] = fn(x, y);
    }
    return g;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  /// Value at multi-index (i, j) where -1 and m denote boundary nodes.
  double at(int i, int j = 0) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);

  /// this += a * x
  GridFunction& axpy(double a, const GridFunction& x);

  friend bool operator==(const GridFunction& a, const GridFunction& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

/// One value per axis-`axis` edge. Edge j along the axis joins node
/// positions j-1 and j (j = 0..m), so boundary-touching edges are included.
class EdgeField {
public:
  EdgeField(const Grid& grid, int axis);
  EdgeField(const Grid& grid, int axis, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int axis() const { return axis_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t e) const { return values_[e]; }
  double& operator[](std::size_t e) { return values_[e]; }

  /// Edge index from (position along axis in 0..m, transverse index in 0..m-1).
  std::size_t index(int along, int across) const;

private:
  Grid grid_;
  int axis_;
  std::vector<double> values_;
};

/// (u_right - u_left)/h on every axis-`axis` edge, ghost zeros on the boundary.
EdgeField forward_diff(const GridFunction& u, int axis);

/// Transpose of forward_diff with respect to plain sums:
/// sum_e g_e (D u)_e == sum_k u_k (D^T g)_k.
GridFunction forward_diff_transpose(const EdgeField& g);

/// Discrete negative second difference along `axis` (D^T D u).
GridFunction negative_second_difference(const GridFunction& u, int axis);

/// Sum of values times h^n.
double quadrature(const GridFunction& u);
double quadrature(const EdgeField& e);

/// <a, b>_h = quadrature(a * b)
double inner(const GridFunction& a, const GridFunction& b);

/// [sum_i quadrature(|D_i u|^p)]^(1/p), p >= 1.
double sobolev_norm(const GridFunction& u, double p);

/// [quadrature(|u|^q)]^(1/q), q >= 1.
double lebesgue_norm(const GridFunction& u, double q);

double max_norm(const GridFunction& u);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace dphase

#endif
