#include "towlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace towlab {

double Box::diameter() const {
  double s = 0;
  for (int a = 0; a < dim; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  return std::sqrt(s);
}

GridPtr build_grid(std::span<const double> lower, std::span<const double> upper,
                   double h) {
  if (lower.size() != upper.size() || lower.empty() || lower.size() > 2)
    throw Error("grid dimension must be 1 or 2");
  if (!(h > 0.0)) throw Error("grid spacing h must be positive");

  auto g = std::make_shared<Grid>();
  g->dim_ = static_cast<int>(lower.size());
  g->n_ = {1, 1};
  for (int a = 0; a < g->dim_; ++a) {
    double span = upper[static_cast<std::size_t>(a)] - lower[static_cast<std::size_t>(a)];
    if (!(span > 0.0))
      throw Error("upper must exceed lower on axis " + std::to_string(a));
    double steps = span / h;
    double rounded = std::round(steps);
    if (rounded < 1.0 || std::fabs(steps - rounded) > 1e-12 * std::max(1.0, steps))
      throw Error("span/h is not an integer on axis " + std::to_string(a) +
                  " (span " + std::to_string(span) + ", h " + std::to_string(h) + ")");
    g->lo_[static_cast<std::size_t>(a)] = lower[static_cast<std::size_t>(a)];
    g->hi_[static_cast<std::size_t>(a)] = upper[static_cast<std::size_t>(a)];
    g->n_[static_cast<std::size_t>(a)] = static_cast<int>(rounded) + 1;
  }
  g->h_ = h;

  int total = g->node_count();
  g->tags_.resize(static_cast<std::size_t>(total), 0);
  for (int node = 0; node < total; ++node) {
    auto mi = g->multi_index(node);
    bool bdry = mi[0] == 0 || mi[0] == g->n_[0] - 1;
    if (g->dim_ == 2) bdry = bdry || mi[1] == 0 || mi[1] == g->n_[1] - 1;
    g->tags_[static_cast<std::size_t>(node)] = bdry ? 1 : 0;
    (bdry ? g->boundary_ : g->interior_).push_back(node);
  }
  return g;
}

GridPtr build_grid(std::initializer_list<double> lower,
                   std::initializer_list<double> upper, double h) {
  return build_grid(std::span<const double>(lower.begin(), lower.size()),
                    std::span<const double>(upper.begin(), upper.size()), h);
}

int Grid::snap(std::span<const double> p, double tol) const {
  if (static_cast<int>(p.size()) != dim_)
    throw Error("point dimension does not match grid");
  std::array<int, 2> idx{0, 0};
  for (int a = 0; a < dim_; ++a) {
    double t = (p[static_cast<std::size_t>(a)] - lo_[static_cast<std::size_t>(a)]) / h_;
    double r = std::round(t);
    if (r < 0 || r > n_[static_cast<std::size_t>(a)] - 1 ||
        std::fabs(t - r) * h_ > tol)
      throw Error("point is not a grid node on axis " + std::to_string(a));
    idx[static_cast<std::size_t>(a)] = static_cast<int>(r);
  }
  return index_of(idx[0], idx[1]);
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_->node_count())
    throw Error("field value count does not match grid node count");
  for (double v : v_)
    if (!std::isfinite(v)) throw Error("field contains a non-finite value");
}

double ScalarField::sup_distance(const ScalarField& other) const {
  double m = 0;
  for (std::size_t i = 0; i < v_.size(); ++i)
    m = std::max(m, std::fabs(v_[i] - other.v_[i]));
  return m;
}

double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }

namespace {

double sample_node(const GridPtr& grid, const FunctionSpec& fn, int node) {
  Bindings b;
  b.set(Var::x, grid->coord(node, 0));
  if (grid->dim() == 2) b.set(Var::y, grid->coord(node, 1));
  double v;
  try {
    v = fn.evaluate(b);
  } catch (const EvalError& e) {
    throw Error("sampling '" + fn.source() + "' failed at node " +
                std::to_string(node) + " (x = " + std::to_string(grid->coord(node, 0)) +
                (grid->dim() == 2 ? ", y = " + std::to_string(grid->coord(node, 1)) : "") +
                "): " + e.what());
  }
  if (!std::isfinite(v))
    throw Error("sampling '" + fn.source() + "' gave a non-finite value at node " +
                std::to_string(node));
  return v;
}

}  // namespace

ScalarField sample(const GridPtr& grid, const FunctionSpec& fn) {
  ScalarField out(grid);
  const int n = grid->node_count();
  for (int node = 0; node < n; ++node) out[node] = sample_node(grid, fn, node);
  return out;
}

ScalarField sample_at(const GridPtr& grid, const FunctionSpec& fn,
                      std::span<const int> nodes, double fill) {
  ScalarField out(grid, fill);
  for (int node : nodes) out[node] = sample_node(grid, fn, node);
  return out;
}

NeighborTable ball_neighbors(const Grid& grid, double r) {
  if (!(r > 0.0)) throw Error("ball radius must be positive");
  NeighborTable t;
  t.radius_ = r;
  const int n = grid.node_count();
  const double r2 = (r + 1e-12) * (r + 1e-12);
  const int reach = static_cast<int>(std::floor(r / grid.spacing() + 1e-9));

  t.offsets_.reserve(static_cast<std::size_t>(n) + 1);
  t.offsets_.push_back(0);
  for (int node = 0; node < n; ++node) {
    auto mi = grid.multi_index(node);
    int x0 = std::max(0, mi[0] - reach), x1 = std::min(grid.nx() - 1, mi[0] + reach);
    int y0 = 0, y1 = 0;
    if (grid.dim() == 2) {
      y0 = std::max(0, mi[1] - reach);
      y1 = std::min(grid.ny() - 1, mi[1] + reach);
    }
    for (int iy = y0; iy <= y1; ++iy)
      for (int ix = x0; ix <= x1; ++ix) {
        int other = grid.index_of(ix, iy);
        if (grid.dist2(node, other) <= r2) t.items_.push_back(other);
      }
    t.offsets_.push_back(static_cast<std::int64_t>(t.items_.size()));
  }
  return t;
}

}  // namespace towlab
