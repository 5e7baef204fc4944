#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "towlab/expr.hpp"

namespace towlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Axis-aligned box, dimension 1 or 2.
struct Box {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  static Box interval(double a, double b) { return {1, {a, 0}, {b, 0}}; }
  static Box rect(double ax, double ay, double bx, double by) {
    return {2, {ax, ay}, {bx, by}};
  }
  // Box shrunk by m on every side.
  Box shrunk(double m) const {
    Box b = *this;
    for (int a = 0; a < dim; ++a) { b.lo[a] += m; b.hi[a] -= m; }
    return b;
  }
  bool contains(std::array<double, 2> p, double slack = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
    return true;
  }
  double diameter() const;
};

// Uniform lattice over a box in dimension 1 or 2. Nodes are indexed
// flat, x fastest: node = iy*nx + ix. Nodes on the box faces are
// boundary, all others interior. Immutable once built.
class Grid {
 public:
  int dim() const { return dim_; }
  double spacing() const { return h_; }
  double lower(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
  double upper(int axis) const { return hi_[static_cast<std::size_t>(axis)]; }
  int count(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  int node_count() const { return n_[0] * n_[1]; }
  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  Box box() const { return {dim_, lo_, hi_}; }

  int index_of(int ix, int iy = 0) const { return iy * n_[0] + ix; }
  std::array<int, 2> multi_index(int node) const {
    return {node % n_[0], node / n_[0]};
  }
  // coordinate = lower + index*h, exactly as constructed
  double coord(int node, int axis) const {
    auto mi = multi_index(node);
    return lo_[static_cast<std::size_t>(axis)] +
           mi[static_cast<std::size_t>(axis)] * h_;
  }
  std::array<double, 2> point(int node) const {
    return {coord(node, 0), dim_ == 2 ? coord(node, 1) : 0.0};
  }

  bool is_boundary(int node) const { return tags_[static_cast<std::size_t>(node)] != 0; }
  bool is_interior(int node) const { return !is_boundary(node); }
  const std::vector<int>& interior_nodes() const { return interior_; }
  const std::vector<int>& boundary_nodes() const { return boundary_; }

  // Squared Euclidean distance between two nodes.
  double dist2(int a, int b) const {
    double s = 0;
    for (int ax = 0; ax < dim_; ++ax) {
      double d = coord(a, ax) - coord(b, ax);
      s += d * d;
    }
    return s;
  }

  // Nearest node to a point; throws if the point is outside the box or
  // farther than tol from any node.
  int snap(std::span<const double> p, double tol = 1e-9) const;

 private:
  friend std::shared_ptr<const Grid> build_grid(std::span<const double>,
                                                std::span<const double>, double);
  int dim_ = 1;
  std::array<double, 2> lo_{0, 0}, hi_{1, 1};
  double h_ = 1;
  std::array<int, 2> n_{2, 1};
  std::vector<std::uint8_t> tags_;  // 1 = boundary
  std::vector<int> interior_, boundary_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Builds the uniform grid with spacing h over [lower, upper]. Each span
// must be an integer multiple of h to 1e-12 relative tolerance.
GridPtr build_grid(std::span<const double> lower, std::span<const double> upper,
                   double h);
GridPtr build_grid(std::initializer_list<double> lower,
                   std::initializer_list<double> upper, double h);

// One finite real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)),
        v_(static_cast<std::size_t>(grid_->node_count()), fill) {}
  ScalarField(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double operator[](int node) const { return v_[static_cast<std::size_t>(node)]; }
  double& operator[](int node) { return v_[static_cast<std::size_t>(node)]; }
  const std::vector<double>& values() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }

  double sup_distance(const ScalarField& other) const;
  double max() const;
  double min() const;

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

// Samples fn at every node. fn may use x (and y in 2D) only; a
// non-finite value is an error naming the node.
ScalarField sample(const GridPtr& grid, const FunctionSpec& fn);

// Samples fn at the listed nodes only; other entries are fill. Lets a
// payoff that is singular off its own node set load cleanly.
ScalarField sample_at(const GridPtr& grid, const FunctionSpec& fn,
                      std::span<const int> nodes, double fill = 0.0);

// Euclidean ball membership of radius r, one list per node, self
// included. Symmetric by construction. Membership uses
// |y - x| <= r + 1e-12 so exact-radius nodes are kept.
class NeighborTable {
 public:
  double radius() const { return radius_; }
  std::span<const int> neighbors(int node) const {
    auto b = offsets_[static_cast<std::size_t>(node)];
    auto e = offsets_[static_cast<std::size_t>(node) + 1];
    return {items_.data() + b, static_cast<std::size_t>(e - b)};
  }

 private:
  friend NeighborTable ball_neighbors(const Grid& grid, double r);
  double radius_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<int> items_;
};

NeighborTable ball_neighbors(const Grid& grid, double r);

}  // namespace towlab
