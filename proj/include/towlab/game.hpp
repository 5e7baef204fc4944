#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "towlab/grid.hpp"

namespace towlab {

enum class SignRegime { positive, negative, zero, mixed };
const char* sign_regime_name(SignRegime s);

// The discrete tug-of-war problem: fair coin each turn, the winner moves
// the token anywhere in the epsilon-ball, Player I collects
// F(exit node) + (eps^2/2) * sum of f over visited interior nodes.
struct GameProblem {
  GridPtr grid;
  double epsilon = 0;
  ScalarField f;  // running payoff, read at interior nodes
  ScalarField F;  // terminal payoff, read at boundary nodes
  SignRegime regime = SignRegime::zero;

  static GameProblem make(GridPtr grid, double epsilon, ScalarField f,
                          ScalarField F);
  static GameProblem make(GridPtr grid, double epsilon, const FunctionSpec& f,
                          const FunctionSpec& F);

  long default_step_cap() const;
};

struct SolveStats {
  int iterations = 0;
  double final_update = 0;
  bool converged = false;
  double wall_seconds = 0;
  std::string warning;  // empty unless the sign regime is mixed
};

enum class Sweep { jacobi, gauss_seidel };

// One value-iteration sweep: at interior nodes
//   u'(x) = (max_ball u + min_ball u)/2 + (eps^2/2) f(x),
// boundary nodes stay at F. Jacobi: reads only the previous iterate.
ScalarField dpp_update(const ScalarField& u, const GameProblem& prob,
                       const NeighborTable& nbr);

// Iterates dpp_update until the sup-norm update falls to tol or max_iter
// is reached. The default initial guess is F on the boundary and the
// boundary mean on the interior. Non-convergence is reported in the
// stats, not thrown.
std::pair<ScalarField, SolveStats> solve_value(
    const GameProblem& prob, double tol, int max_iter,
    Sweep sweep = Sweep::jacobi,
    const std::optional<ScalarField>& initial = std::nullopt);

struct Playout {
  double payoff = 0;
  long steps = 0;
  bool terminated = false;  // false when the step cap was hit
};

// One coin-toss game under the greedy strategies for the given value
// field: the max player moves to an argmax of value over the ball, the
// min player to an argmin, ties broken toward the lowest node index.
// The coin is the low bit of a mt19937_64 draw, so payoff streams are
// reproducible for a fixed seed.
Playout simulate_playout(const GameProblem& prob, const ScalarField& value,
                         const NeighborTable& nbr, int start,
                         std::uint64_t seed, long step_cap);

struct McEstimate {
  double mean = 0;
  double std_error = 0;  // 0 when n = 1
  double truncated_fraction = 0;
};

// Sample mean and standard error over n playouts; playout k uses seed
// seed + k. Capped runs are included in the mean (without the terminal
// term) and counted in truncated_fraction.
McEstimate estimate_value_mc(const GameProblem& prob, const ScalarField& value,
                             int start, int n_samples, std::uint64_t seed,
                             long step_cap);

}  // namespace towlab
