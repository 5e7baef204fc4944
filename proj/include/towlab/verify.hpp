#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "towlab/game.hpp"
#include "towlab/grid.hpp"
#include "towlab/operators.hpp"

namespace towlab {

// Running cost recovered from a value field: f_hat = -Dinf u / |Du|^2
// wherever |Du| >= theta.
struct RecoveryReport {
  MaskedField recovered;
  double theta = 0;
  double coverage = 0;  // masked fraction of interior nodes
  std::optional<double> sup_error;       // vs reference, on the mask
  std::optional<double> mean_abs_error;  // vs reference, on the mask
  std::string warning;
};

RecoveryReport recover_cost(const ScalarField& u, double theta,
                            const ScalarField* reference = nullptr);

// Solves the same boundary problem under two running costs and reports
// the sup-norm gap between the value fields. Distinct costs must produce
// a gap; the gap is omitted when either solve fails to converge.
struct UniquenessReport {
  SolveStats stats_f, stats_g;
  SignRegime regime_f = SignRegime::zero, regime_g = SignRegime::zero;
  ScalarField u_f, u_g;
  std::optional<double> gap;
  int gap_node = -1;
};

UniquenessReport uniqueness_experiment(const FunctionSpec& f,
                                       const FunctionSpec& g,
                                       const FunctionSpec& F, GridPtr grid,
                                       double epsilon, double tol, int max_iter);

// Exhaustive maximizer of w(x, y) = u(x) - v(y) - |x-y|^2 / (2 eps)
// over all node pairs; ties go to the lowest (x, y) pair in scan order.
struct DoublingReport {
  double epsilon = 0;
  int x_node = -1, y_node = -1;
  double gap = 0;    // |x_bar - y_bar|
  double w_max = 0;
  double gap_over_eps = 0;
};

DoublingReport doubling_diagnostic(const ScalarField& u, const ScalarField& v,
                                   double epsilon);

// Largest adjacent difference over h; a discrete Lipschitz constant.
double lipschitz_estimate(const ScalarField& u);

// Slope of u about a node: (max over the discrete sphere of u - u(x)) / r,
// with the sphere taken as the annulus r-h < |y-x| <= r.
struct SlopeReport {
  struct Entry {
    double r = 0;
    double slope = 0;
    int argmax_node = -1;
    double s_plus_at_argmax = 0;
  };
  int center = -1;
  std::vector<Entry> entries;
  bool monotone = false;    // nondecreasing within h
  double s_plus_center = 0; // slope at the smallest listed radius
  // Endpoint triple at the largest radius: local slope at the argmax
  // node, the slope itself, local slope at the center.
  std::array<double, 3> endpoint{0, 0, 0};
};

SlopeReport slope_analysis(const ScalarField& u, int center,
                           const std::vector<double>& radii);

// Local slope surrogate for S_+ at a node: the maximum of
// (u(z) - u(node)) / |z - node| over 0 < |z - node| <= probe_radius.
// The distance-ratio normalization keeps directional resolution; plain
// axis differences under-read gradients pointing between axes.
double local_slope(const ScalarField& u, int node, double probe_radius);

enum class ConeSide { above, below };
const char* cone_side_name(ConeSide s);

// Falsifier for comparison with cones on a sub-box V: scans cone
// vertices on grid nodes around V and slopes fitted from the values of
// u on the discrete boundary of V, and reports the worst interior
// violation of cone domination (side above) or cone minorization (side
// below). A pass means no scanned cone violates by more than tol; it
// does not prove the property.
struct ConeComparisonReport {
  ConeSide side = ConeSide::above;
  bool pass = false;
  double worst_violation = 0;
  int worst_node = -1;
  std::array<double, 2> worst_vertex{0, 0};
  double worst_slope = 0, worst_offset = 0;
  double tol = 0;
  int cones_scanned = 0;
};

ConeComparisonReport cone_comparison_check(const ScalarField& u, const Box& V,
                                           ConeSide side, double tol);

}  // namespace towlab
