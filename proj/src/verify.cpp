#include "towlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace towlab {

RecoveryReport recover_cost(const ScalarField& u, double theta,
                            const ScalarField* reference) {
  RecoveryReport rep;
  rep.theta = theta;
  MaskedField q = normalized_inf_laplacian(u, theta);
  for (int node = 0; node < u.size(); ++node) q.field[node] = -q.field[node];
  rep.recovered = std::move(q);

  const auto& interior = u.grid().interior_nodes();
  int valid = rep.recovered.valid_count();
  rep.coverage = interior.empty()
                     ? 0.0
                     : static_cast<double>(valid) / static_cast<double>(interior.size());
  if (valid == 0) {
    rep.warning = "gradient below theta everywhere; no node admits recovery";
    return rep;
  }
  if (reference) {
    double sup = 0, sum = 0;
    for (int node : interior) {
      if (!rep.recovered.mask[static_cast<std::size_t>(node)]) continue;
      double e = std::fabs(rep.recovered.field[node] - (*reference)[node]);
      sup = std::max(sup, e);
      sum += e;
    }
    rep.sup_error = sup;
    rep.mean_abs_error = sum / static_cast<double>(valid);
  }
  return rep;
}

UniquenessReport uniqueness_experiment(const FunctionSpec& f,
                                       const FunctionSpec& g,
                                       const FunctionSpec& F, GridPtr grid,
                                       double epsilon, double tol,
                                       int max_iter) {
  UniquenessReport rep;
  GameProblem pf = GameProblem::make(grid, epsilon, f, F);
  GameProblem pg = GameProblem::make(grid, epsilon, g, F);
  rep.regime_f = pf.regime;
  rep.regime_g = pg.regime;

  auto [uf, sf] = solve_value(pf, tol, max_iter);
  auto [ug, sg] = solve_value(pg, tol, max_iter);
  rep.stats_f = sf;
  rep.stats_g = sg;
  rep.u_f = std::move(uf);
  rep.u_g = std::move(ug);

  if (!sf.converged || !sg.converged) return rep;  // gap omitted

  double gap = -1;
  for (int node = 0; node < rep.u_f.size(); ++node) {
    double d = std::fabs(rep.u_f[node] - rep.u_g[node]);
    if (d > gap) {
      gap = d;
      rep.gap_node = node;
    }
  }
  rep.gap = gap;
  return rep;
}

DoublingReport doubling_diagnostic(const ScalarField& u, const ScalarField& v,
                                   double epsilon) {
  if (&u.grid() != &v.grid() && u.size() != v.size())
    throw Error("doubling diagnostic needs u and v on the same grid");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  const Grid& grid = u.grid();
  const double inv2e = 1.0 / (2.0 * epsilon);
  const double vmin = v.min();

  DoublingReport rep;
  rep.epsilon = epsilon;
  double best = -std::numeric_limits<double>::infinity();
  const int n = grid.node_count();
  for (int x = 0; x < n; ++x) {
    if (u[x] - vmin <= best) continue;  // no y in this row can improve
    for (int y = 0; y < n; ++y) {
      double w = u[x] - v[y] - grid.dist2(x, y) * inv2e;
      if (w > best) {
        best = w;
        rep.x_node = x;
        rep.y_node = y;
      }
    }
  }
  rep.w_max = best;
  rep.gap = std::sqrt(grid.dist2(rep.x_node, rep.y_node));
  rep.gap_over_eps = rep.gap / epsilon;
  return rep;
}

double lipschitz_estimate(const ScalarField& u) {
  const Grid& grid = u.grid();
  const double invh = 1.0 / grid.spacing();
  const double invdiag = invh / std::sqrt(2.0);
  double lip = 0;
  for (int iy = 0; iy < grid.ny(); ++iy)
    for (int ix = 0; ix < grid.nx(); ++ix) {
      int node = grid.index_of(ix, iy);
      bool right = ix + 1 < grid.nx(), up = iy + 1 < grid.ny();
      if (right) lip = std::max(lip, std::fabs(u[node + 1] - u[node]) * invh);
      if (up) lip = std::max(lip, std::fabs(u[node + grid.nx()] - u[node]) * invh);
      // diagonal pairs, difference over their separation h*sqrt(2)
      if (right && up)
        lip = std::max(lip, std::fabs(u[node + grid.nx() + 1] - u[node]) * invdiag);
      if (right && iy > 0)
        lip = std::max(lip, std::fabs(u[node - grid.nx() + 1] - u[node]) * invdiag);
    }
  return lip;
}

double local_slope(const ScalarField& u, int node, double probe_radius) {
  const Grid& grid = u.grid();
  const double h = grid.spacing();
  const double rho = probe_radius > 0 ? probe_radius : h;
  auto mi = grid.multi_index(node);
  const int reach = static_cast<int>(std::floor(rho / h + 1e-9));
  double best = 0;
  int y0 = 0, y1 = 0;
  if (grid.dim() == 2) {
    y0 = std::max(0, mi[1] - reach);
    y1 = std::min(grid.ny() - 1, mi[1] + reach);
  }
  for (int iy = y0; iy <= y1; ++iy)
    for (int ix = std::max(0, mi[0] - reach);
         ix <= std::min(grid.nx() - 1, mi[0] + reach); ++ix) {
      int other = grid.index_of(ix, iy);
      if (other == node) continue;
      double d = std::sqrt(grid.dist2(node, other));
      if (d > rho + 1e-12) continue;
      best = std::max(best, (u[other] - u[node]) / d);
    }
  return best;
}

SlopeReport slope_analysis(const ScalarField& u, int center,
                           const std::vector<double>& radii) {
  const Grid& grid = u.grid();
  const double h = grid.spacing();
  if (radii.empty()) throw Error("slope analysis needs at least one radius");
  if (radii.front() < h - 1e-12)
    throw Error("radius " + std::to_string(radii.front()) +
                " is below the grid spacing; the annulus would be empty");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw Error("radius list must be strictly increasing");

  for (double r : radii)
    for (int axis = 0; axis < grid.dim(); ++axis) {
      double c = grid.coord(center, axis);
      if (c - grid.lower(axis) < r - 1e-12 || grid.upper(axis) - c < r - 1e-12)
        throw Error("ball of radius " + std::to_string(r) +
                    " about the center exits the grid");
    }

  SlopeReport rep;
  rep.center = center;
  const int n = grid.node_count();
  for (double r : radii) {
    SlopeReport::Entry e;
    e.r = r;
    double best = -std::numeric_limits<double>::infinity();
    for (int node = 0; node < n; ++node) {
      double d = std::sqrt(grid.dist2(center, node));
      if (d <= r + 1e-12 && d > r - h + 1e-12 && u[node] > best) {
        best = u[node];
        e.argmax_node = node;
      }
    }
    if (e.argmax_node < 0)
      throw Error("empty annulus at radius " + std::to_string(r));
    e.slope = (best - u[center]) / r;
    e.s_plus_at_argmax = local_slope(u, e.argmax_node, radii.front());
    rep.entries.push_back(e);
  }

  rep.monotone = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    if (rep.entries[i].slope < rep.entries[i - 1].slope - h) rep.monotone = false;
  // S_+ at the center is the smallest-radius slope: it shares the
  // annulus direction bias of every slope(r), so the endpoint ordering
  // is not wrecked by lattice direction quantization. At the argmax
  // the upper-biased distance-ratio slope is the honest majorant.
  rep.s_plus_center = rep.entries.front().slope;
  const auto& last = rep.entries.back();
  rep.endpoint = {last.s_plus_at_argmax, last.slope, rep.s_plus_center};
  return rep;
}

const char* cone_side_name(ConeSide s) {
  return s == ConeSide::above ? "above" : "below";
}

ConeComparisonReport cone_comparison_check(const ScalarField& u, const Box& V,
                                           ConeSide side, double tol) {
  const Grid& grid = u.grid();
  const double h = grid.spacing();
  if (V.dim != grid.dim()) throw Error("V dimension does not match the grid");
  for (int a = 0; a < V.dim; ++a)
    if (V.lo[static_cast<std::size_t>(a)] < grid.lower(a) - 1e-12 ||
        V.hi[static_cast<std::size_t>(a)] > grid.upper(a) + 1e-12 ||
        !(V.hi[static_cast<std::size_t>(a)] - V.lo[static_cast<std::size_t>(a)] > h))
      throw Error("V must be a box inside the grid spanning more than one cell");

  // Node sets: the discrete boundary ring of V and its inside.
  std::vector<int> ring, inside;
  const int n = grid.node_count();
  for (int node = 0; node < n; ++node) {
    auto p = grid.point(node);
    if (!V.contains(p, 1e-12)) continue;
    bool on_face = false;
    for (int a = 0; a < V.dim; ++a) {
      double c = p[static_cast<std::size_t>(a)];
      if (std::fabs(c - V.lo[static_cast<std::size_t>(a)]) <= h / 2 ||
          std::fabs(c - V.hi[static_cast<std::size_t>(a)]) <= h / 2)
        on_face = true;
    }
    (on_face ? ring : inside).push_back(node);
  }
  if (ring.empty() || inside.empty())
    throw Error("V is too small to hold a boundary ring and interior nodes");

  double umin = u[ring[0]], umax = u[ring[0]];
  for (int node : ring) {
    umin = std::min(umin, u[node]);
    umax = std::max(umax, u[node]);
  }
  const double spread = std::max(umax - umin, 1e-6 * std::max(1.0, std::fabs(umax)));
  const double offsets[] = {-2.0, -1.5, -1.0, -0.75, -0.5, -0.25,
                            0.0,  0.25, 0.5,  0.75,  1.0};

  // Candidate vertices: a coarse sublattice of nodes within 2 diam(V) of
  // V and not strictly inside it.
  const double diam = V.diameter();
  const int stride = std::max(1, static_cast<int>(std::round(diam / (10.0 * h))));
  std::vector<int> vertices;
  for (int iy = 0; iy < grid.ny(); iy += grid.dim() == 2 ? stride : 1)
    for (int ix = 0; ix < grid.nx(); ix += stride) {
      int node = grid.index_of(ix, iy);
      auto p = grid.point(node);
      double gap2 = 0;
      for (int a = 0; a < V.dim; ++a) {
        double c = p[static_cast<std::size_t>(a)];
        double d = std::max({V.lo[static_cast<std::size_t>(a)] - c,
                             c - V.hi[static_cast<std::size_t>(a)], 0.0});
        gap2 += d * d;
      }
      if (gap2 > 4.0 * diam * diam) continue;
      if (V.shrunk(h / 2).contains(p)) continue;  // vertex must not be in V
      vertices.push_back(node);
    }

  ConeComparisonReport rep;
  rep.side = side;
  rep.tol = tol;
  rep.worst_violation = -std::numeric_limits<double>::infinity();

  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int vtx : vertices) {
    auto vp = grid.point(vtx);
    for (int node : ring)
      dist[static_cast<std::size_t>(node)] = std::sqrt(grid.dist2(vtx, node));
    for (int node : inside)
      dist[static_cast<std::size_t>(node)] = std::sqrt(grid.dist2(vtx, node));

    for (double t : offsets) {
      const double b = umin + t * spread;
      // Tightest slope so that the cone a|x - vertex| + b dominates u on
      // the ring (above) or stays below it (below).
      double a = side == ConeSide::above
                     ? -std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::infinity();
      bool feasible = true;
      for (int node : ring) {
        double d = dist[static_cast<std::size_t>(node)];
        if (d < h / 2) {  // vertex sits on the ring node itself
          if (side == ConeSide::above ? u[node] > b + 1e-12 : u[node] < b - 1e-12)
            feasible = false;
          continue;
        }
        double q = (u[node] - b) / d;
        a = side == ConeSide::above ? std::max(a, q) : std::min(a, q);
      }
      if (!feasible || !std::isfinite(a)) continue;
      ++rep.cones_scanned;

      for (int node : inside) {
        double cone = a * dist[static_cast<std::size_t>(node)] + b;
        double viol = side == ConeSide::above ? u[node] - cone : cone - u[node];
        if (viol > rep.worst_violation) {
          rep.worst_violation = viol;
          rep.worst_node = node;
          rep.worst_vertex = vp;
          rep.worst_slope = a;
          rep.worst_offset = b;
        }
      }
    }
  }
  if (rep.cones_scanned == 0) throw Error("no admissible cone could be fitted");
  rep.pass = rep.worst_violation <= tol;
  return rep;
}

}  // namespace towlab
