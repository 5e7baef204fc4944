#pragma once

#include <optional>
#include <string>
#include <vector>

#include "towlab/grid.hpp"
#include "towlab/operators.hpp"

namespace towlab {

// One (form, role, running cost) combination a reference solution is
// expected to pass or fail under viscosity_check.
struct ClassificationClaim {
  Form form;
  Role role;
  std::string f_text;  // running cost expression
  bool expect_pass;
};

// A closed-form function with its analytic classification, used as an
// oracle by the experiment suites.
struct ReferenceSolution {
  std::string name;
  std::string expr_text;
  int dim = 1;
  Box default_domain;
  // Region where the function is smooth enough for classical stencils;
  // shrink by 2h before differencing so stencils stay clear of the
  // singular set. Unset means the whole domain.
  std::optional<Box> smooth_region;
  // Residual tolerance for claims is tol_scale * h^2.
  double tol_scale = 10.0;
  std::vector<ClassificationClaim> claims;
  std::string notes;

  FunctionSpec fn() const { return FunctionSpec::parse(expr_text); }
  Box validity_box(double h) const {
    return (smooth_region ? *smooth_region : default_domain).shrunk(2.0 * h);
  }
};

const std::vector<ReferenceSolution>& catalog();

// Catalog entry by name, or null.
const ReferenceSolution* find_solution(const std::string& name);

// Catalog entry expression when text names one, otherwise parse text.
FunctionSpec resolve_function(const std::string& text);

}  // namespace towlab
