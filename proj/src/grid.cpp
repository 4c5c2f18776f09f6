#include "dphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dphase {

Grid::Grid(int n, int m) : n_(n), m_(m) {
  if (n != 1 && n != 2)
    throw contract_error("grid: unsupported dimension n=" + std::to_string(n) +
                         " (expected 1 or 2)");
  if (m < 1)
    throw contract_error("grid: resolution m=" + std::to_string(m) +
                         " must be at least 1");
  h_ = 1.0 / (m + 1);
  cell_volume_ = n == 1 ? h_ : h_ * h_;
  node_count_ = n == 1 ? static_cast<std::size_t>(m)
                       : static_cast<std::size_t>(m) * m;
}

std::size_t Grid::edge_count(int axis) const {
  if (axis < 0 || axis >= n_)
    throw contract_error("grid: axis " + std::to_string(axis) +
                         " out of range for dimension " + std::to_string(n_));
  return n_ == 1 ? static_cast<std::size_t>(m_ + 1)
                 : static_cast<std::size_t>(m_ + 1) * m_;
}

Grid build_grid(int n, int m) { return Grid(n, m); }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b))
    throw contract_error(std::string(what) + ": grid mismatch");
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(const Grid& grid)
    : grid_(grid), values_(grid.node_count(), 0.0) {}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    throw contract_error("grid function: expected " +
                         std::to_string(grid_.node_count()) + " values, got " +
                         std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v))
      throw contract_error("grid function: non-finite value");
}

GridFunction GridFunction::constant(const Grid& grid, double value) {
  GridFunction g(grid);
  std::fill(g.values_.begin(), g.values_.end(), value);
  return g;
}

double GridFunction::at(int i, int j) const {
  const int m = grid_.per_axis();
  if (i < 0 || i >= m) return 0.0;
  if (grid_.dim() == 2 && (j < 0 || j >= m)) return 0.0;
  return values_[grid_.node_index({i, j})];
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(grid_, o.grid_, "grid function +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(grid_, o.grid_, "grid function -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction& GridFunction::axpy(double a, const GridFunction& x) {
  require_same_grid(grid_, x.grid_, "grid function axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

// ---------------------------------------------------------------------------

EdgeField::EdgeField(const Grid& grid, int axis)
    : grid_(grid), axis_(axis), values_(grid.edge_count(axis), 0.0) {}

EdgeField::EdgeField(const Grid& grid, int axis, std::vector<double> values)
    : grid_(grid), axis_(axis), values_(std::move(values)) {
  if (values_.size() != grid_.edge_count(axis))
    throw contract_error("edge field: wrong number of values");
}

std::size_t EdgeField::index(int along, int across) const {
  const int m = grid_.per_axis();
  if (grid_.dim() == 1) return static_cast<std::size_t>(along);
  if (axis_ == 0) return static_cast<std::size_t>(along) * m + across;
  return static_cast<std::size_t>(across) * (m + 1) + along;
}

namespace {

// Node k = base(t) + pos * stride for node position `pos` along `axis` and
// transverse index t.
struct AxisLayout {
  std::size_t stride;
  std::size_t transverse_stride;
  int transverse;
};

AxisLayout layout(const Grid& g, int axis) {
  const std::size_t m = static_cast<std::size_t>(g.per_axis());
  if (g.dim() == 1) return {1, 0, 1};
  return axis == 0 ? AxisLayout{m, 1, g.per_axis()} : AxisLayout{1, m, g.per_axis()};
}

}  // namespace

EdgeField forward_diff(const GridFunction& u, int axis) {
  const Grid& g = u.grid();
  EdgeField d(g, axis);
  const int m = g.per_axis();
  const AxisLayout lay = layout(g, axis);
  const double inv_h = 1.0 / g.spacing();
  const std::span<const double> v = u.values();
  for (int t = 0; t < lay.transverse; ++t) {
    const std::size_t base = t * lay.transverse_stride;
    double left = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double right = j < m ? v[base + j * lay.stride] : 0.0;
      d[d.index(j, t)] = (right - left) * inv_h;
      left = right;
    }
  }
  return d;
}

GridFunction forward_diff_transpose(const EdgeField& e) {
  const Grid& g = e.grid();
  GridFunction out(g);
  const int m = g.per_axis();
  const AxisLayout lay = layout(g, e.axis());
  const double inv_h = 1.0 / g.spacing();
  for (int t = 0; t < lay.transverse; ++t) {
    const std::size_t base = t * lay.transverse_stride;
    // node i sits at the right end of edge i and the left end of edge i+1
    for (int i = 0; i < m; ++i)
      out[base + i * lay.stride] = (e[e.index(i, t)] - e[e.index(i + 1, t)]) * inv_h;
  }
  return out;
}

GridFunction negative_second_difference(const GridFunction& u, int axis) {
  return forward_diff_transpose(forward_diff(u, axis));
}

double quadrature(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.grid().cell_volume();
}

double quadrature(const EdgeField& e) {
  double s = 0.0;
  for (double v : e.values()) s += v;
  return s * e.grid().cell_volume();
}

double inner(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "inner product");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_volume();
}

double sobolev_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0)) throw contract_error("sobolev_norm: exponent p must be >= 1");
  double s = 0.0;
  for (int axis = 0; axis < u.grid().dim(); ++axis) {
    const EdgeField diff = forward_diff(u, axis);
    for (double d : diff.values()) s += std::pow(std::abs(d), p);
  }
  return std::pow(s * u.grid().cell_volume(), 1.0 / p);
}

double lebesgue_norm(const GridFunction& u, double q) {
  if (!(q >= 1.0)) throw contract_error("lebesgue_norm: exponent q must be >= 1");
  double s = 0.0;
  for (double v : u.values()) s += std::pow(std::abs(v), q);
  return std::pow(s * u.grid().cell_volume(), 1.0 / q);
}

double max_norm(const GridFunction& u) {
  double s = 0.0;
  for (double v : u.values()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace dphase
