#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "towlab/expr.hpp"
#include "towlab/game.hpp"
#include "towlab/operators.hpp"
#include "towlab/verify.hpp"

namespace towlab {

struct ConfigError : std::runtime_error {
  ConfigError(std::string field_, int line_, const std::string& what)
      : std::runtime_error(what), field(std::move(field_)), line(line_) {}
  std::string field;  // "section.key", empty when structural
  int line;           // 1-based line in the config text, 0 when not tied to one
};

enum class Selector { solve, recover, unique, doubling, slope, cones, check, simulate };
const char* selector_name(Selector s);

enum class RoleSelect { sub, super, both };
enum class SideSelect { above, below, both };

// A validated experiment description. Expressions are resolved (catalog
// name or parsed text) at load time.
struct ExperimentConfig {
  // raw key/value echo in file order, for the report
  struct RawEntry { std::string section, key, value; };
  std::vector<RawEntry> raw;

  // grid
  std::vector<double> lower, upper;
  double h = 0;

  // game
  std::optional<double> epsilon;
  std::optional<FunctionSpec> f, g, F;
  std::string f_text, g_text, F_text;

  // solver
  double tol = 1e-8;
  int max_iter = 1'000'000;
  Sweep sweep = Sweep::jacobi;

  // operator
  std::optional<double> theta;   // default sqrt(h)
  std::optional<double> op_tol;  // default 10 h^2 sampled, 10 sqrt(h) solver output
  Form form = Form::ratio;
  RoleSelect role = RoleSelect::both;
  std::optional<HamiltonianSpec::Parts> hamiltonian;
  std::optional<FunctionSpec> b1, b2, c;
  double fd_step = 1e-5;

  // experiment
  Selector selector = Selector::solve;
  std::optional<FunctionSpec> u, v;
  std::string u_text, v_text;
  std::vector<double> center;
  std::vector<double> radii;
  std::vector<double> eps_list;
  std::vector<double> v_lower, v_upper;
  SideSelect direction = SideSelect::both;
  std::vector<double> start;
  int samples = 10'000;
  long step_cap = 0;  // 0 = problem default
  std::uint64_t seed = 0;

  // output
  std::string out_dir = ".";
  std::string report_name = "report.json";
  std::string field_csv = "field.csv";
  std::string recovered_csv = "recovered.csv";
  std::string slope_csv = "slope.csv";
  std::string doubling_csv = "doubling.csv";

  GridPtr make_grid() const;
  double theta_or_default() const;
  // Residual tolerance for checks: sampled fields get 10 h^2, solver
  // outputs 10 sqrt(h).
  double check_tol(bool solver_output) const;
};

// Parses and validates the documented key = value format (flat
// [section] blocks, UTF-8, '#' comments). Overrides are
// "section.key=value" strings applied before validation.
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

}  // namespace towlab
