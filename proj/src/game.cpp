#include "towlab/game.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace towlab {

const char* sign_regime_name(SignRegime s) {
  switch (s) {
    case SignRegime::positive: return "positive";
    case SignRegime::negative: return "negative";
    case SignRegime::zero: return "zero";
    case SignRegime::mixed: return "mixed";
  }
  return "?";
}

namespace {

SignRegime classify(const Grid& grid, const ScalarField& f) {
  bool any_pos = false, any_neg = false, any_zero = false;
  for (int node : grid.interior_nodes()) {
    if (f[node] > 0) any_pos = true;
    else if (f[node] < 0) any_neg = true;
    else any_zero = true;
  }
  if (!any_pos && !any_neg) return SignRegime::zero;
  if (any_pos && !any_neg && !any_zero) return SignRegime::positive;
  if (any_neg && !any_pos && !any_zero) return SignRegime::negative;
  return SignRegime::mixed;
}

}  // namespace

GameProblem GameProblem::make(GridPtr grid, double epsilon, ScalarField f,
                              ScalarField F) {
  if (!(epsilon >= grid->spacing()))
    throw Error("epsilon must be at least the grid spacing h");
  GameProblem p;
  p.regime = classify(*grid, f);
  p.grid = std::move(grid);
  p.epsilon = epsilon;
  p.f = std::move(f);
  p.F = std::move(F);
  return p;
}

GameProblem GameProblem::make(GridPtr grid, double epsilon, const FunctionSpec& f,
                              const FunctionSpec& F) {
  // f lives on interior nodes, F on the boundary; neither needs to
  // evaluate on the other set.
  ScalarField fs = sample_at(grid, f, grid->interior_nodes());
  ScalarField Fs = sample_at(grid, F, grid->boundary_nodes());
  return make(std::move(grid), epsilon, std::move(fs), std::move(Fs));
}

long GameProblem::default_step_cap() const {
  double cap = 1e6 / (epsilon * epsilon);
  return cap > 9e18 ? static_cast<long>(9e18) : static_cast<long>(cap);
}

ScalarField dpp_update(const ScalarField& u, const GameProblem& prob,
                       const NeighborTable& nbr) {
  const Grid& grid = *prob.grid;
  ScalarField next = u;
  const double half_eps2 = 0.5 * prob.epsilon * prob.epsilon;
  for (int node : grid.interior_nodes()) {
    double lo = u[node], hi = u[node];
    for (int nb : nbr.neighbors(node)) {
      double v = u[nb];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    next[node] = 0.5 * (hi + lo) + half_eps2 * prob.f[node];
  }
  return next;
}

namespace {

// In-place sweep reading already-updated values in node order.
double gauss_seidel_sweep(ScalarField& u, const GameProblem& prob,
                          const NeighborTable& nbr) {
  const Grid& grid = *prob.grid;
  const double half_eps2 = 0.5 * prob.epsilon * prob.epsilon;
  double update = 0;
  for (int node : grid.interior_nodes()) {
    double lo = u[node], hi = u[node];
    for (int nb : nbr.neighbors(node)) {
      double v = u[nb];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double next = 0.5 * (hi + lo) + half_eps2 * prob.f[node];
    update = std::max(update, std::fabs(next - u[node]));
    u[node] = next;
  }
  return update;
}

}  // namespace

std::pair<ScalarField, SolveStats> solve_value(
    const GameProblem& prob, double tol, int max_iter, Sweep sweep,
    const std::optional<ScalarField>& initial) {
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_iter < 1) throw Error("max_iter must be at least 1");
  const Grid& grid = *prob.grid;
  const auto t0 = std::chrono::steady_clock::now();

  NeighborTable nbr = ball_neighbors(grid, prob.epsilon);

  ScalarField u(prob.grid, 0.0);
  if (initial) {
    u = *initial;
  } else {
    double mean = 0;
    for (int node : grid.boundary_nodes()) mean += prob.F[node];
    mean /= static_cast<double>(grid.boundary_nodes().size());
    for (int node : grid.interior_nodes()) u[node] = mean;
  }
  for (int node : grid.boundary_nodes()) u[node] = prob.F[node];

  SolveStats stats;
  if (prob.regime == SignRegime::mixed)
    stats.warning =
        "running payoff changes sign or vanishes on the interior; "
        "value iteration may not converge";

  double update = 0;
  for (int it = 1; it <= max_iter; ++it) {
    if (sweep == Sweep::jacobi) {
      ScalarField next = dpp_update(u, prob, nbr);
      update = next.sup_distance(u);
      u = std::move(next);
    } else {
      update = gauss_seidel_sweep(u, prob, nbr);
    }
    stats.iterations = it;
    if (update <= tol) {
      stats.converged = true;
      break;
    }
  }
  stats.final_update = update;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(u), stats};
}

Playout simulate_playout(const GameProblem& prob, const ScalarField& value,
                         const NeighborTable& nbr, int start,
                         std::uint64_t seed, long step_cap) {
  const Grid& grid = *prob.grid;
  if (!grid.is_interior(start)) throw Error("playout start node must be interior");
  if (step_cap < 1) throw Error("step cap must be at least 1");

  std::mt19937_64 rng(seed);
  const double half_eps2 = 0.5 * prob.epsilon * prob.epsilon;

  Playout out;
  int pos = start;
  while (out.steps < step_cap) {
    out.payoff += half_eps2 * prob.f[pos];
    ++out.steps;
    const bool max_player = (rng() & 1ULL) != 0;
    // Neighbors are listed in increasing index order and strict
    // comparison never replaces an equal earlier entry, so ties go to
    // the lowest node index.
    int best = -1;
    double best_v = 0;
    for (int nb : nbr.neighbors(pos)) {
      double v = value[nb];
      if (best < 0 || (max_player ? v > best_v : v < best_v)) {
        best = nb;
        best_v = v;
      }
    }
    pos = best;
    if (grid.is_boundary(pos)) {
      out.payoff += prob.F[pos];
      out.terminated = true;
      return out;
    }
  }
  return out;  // capped: payoff excludes the terminal term
}

McEstimate estimate_value_mc(const GameProblem& prob, const ScalarField& value,
                             int start, int n_samples, std::uint64_t seed,
                             long step_cap) {
  if (n_samples < 1) throw Error("n_samples must be at least 1");
  NeighborTable nbr = ball_neighbors(*prob.grid, prob.epsilon);

  double sum = 0, sumsq = 0;
  long truncated = 0;
  for (int k = 0; k < n_samples; ++k) {
    Playout p = simulate_playout(prob, value, nbr, start,
                                 seed + static_cast<std::uint64_t>(k), step_cap);
    sum += p.payoff;
    sumsq += p.payoff * p.payoff;
    truncated += !p.terminated;
  }
  McEstimate est;
  const double n = static_cast<double>(n_samples);
  est.mean = sum / n;
  if (n_samples > 1) {
    double var = std::max(0.0, (sumsq - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  est.truncated_fraction = static_cast<double>(truncated) / n;
  return est;
}

}  // namespace towlab
