#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "towlab/solutions.hpp"

using namespace towlab;

namespace {

// Grid over a box with the upper face pulled down to a multiple of h.
GridPtr grid_over(const Box& box, double h) {
  std::vector<double> lo(box.lo.begin(), box.lo.begin() + box.dim);
  std::vector<double> hi(lo);
  for (int a = 0; a < box.dim; ++a) {
    double span = box.hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)];
    double steps = std::max(1.0, std::floor(span / h + 1e-9));
    hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + steps * h;
  }
  return build_grid(std::span<const double>(lo), std::span<const double>(hi), h);
}

}  // namespace

TEST_CASE("the catalog carries the expected entries") {
  const char* names[] = {"plane",    "plane2d",  "cone",
                         "aronsson43", "zero-counterexample", "quad-f2",
                         "quad-sym", "parabola"};
  for (const char* n : names) {
    INFO(n);
    CHECK(find_solution(n) != nullptr);
  }
  CHECK(find_solution("not-a-solution") == nullptr);
}

TEST_CASE("aronsson validity region keeps clear of the axes") {
  const ReferenceSolution* s = find_solution("aronsson43");
  REQUIRE(s != nullptr);
  Box v = s->validity_box(0.01);
  CHECK(v.lo[0] > 0.0);
  CHECK(v.lo[1] > 0.0);
  CHECK(s->dim == 2);
}

TEST_CASE("the zero counterexample is classified asymmetrically") {
  const ReferenceSolution* s = find_solution("zero-counterexample");
  REQUIRE(s != nullptr);
  bool product_sub_pass = false, ratio_sub_fail = false;
  for (const auto& c : s->claims) {
    if (c.form == Form::product && c.role == Role::sub)
      product_sub_pass = c.expect_pass;
    if (c.form == Form::ratio && c.role == Role::sub)
      ratio_sub_fail = !c.expect_pass;
  }
  CHECK(product_sub_pass);
  CHECK(ratio_sub_fail);
}

TEST_CASE("quad-f2 is the ratio-form solution for constant cost 2") {
  const ReferenceSolution* s = find_solution("quad-f2");
  REQUIRE(s != nullptr);
  CHECK(s->expr_text == "2*x - x^2");
  for (const auto& c : s->claims) {
    CHECK(c.f_text == "2");
    CHECK(c.expect_pass);
  }
}

TEST_CASE("catalog names resolve ahead of expression parsing") {
  FunctionSpec fn = resolve_function("parabola");
  CHECK(fn.evaluate(Bindings::at(3.0)) == 9.0);
  FunctionSpec expr = resolve_function("x + 1");
  CHECK(expr.evaluate(Bindings::at(3.0)) == 4.0);
  CHECK_THROWS_AS(resolve_function("definitely not an expression ("), ParseError);
}

TEST_CASE("every classification claim holds on the validity region") {
  for (const auto& s : catalog()) {
    const double h = s.dim == 1 ? 0.025 : 0.05;
    GridPtr grid = grid_over(s.validity_box(h), h);
    ScalarField u = sample(grid, s.fn());
    const double theta = std::sqrt(h);
    const double tol = s.tol_scale * h * h;
    for (const auto& claim : s.claims) {
      INFO(s.name, " ", form_name(claim.form), "/", role_name(claim.role),
           " f=", claim.f_text);
      ScalarField f = sample(grid, FunctionSpec::parse(claim.f_text));
      ViscosityVerdict v = viscosity_check(u, f, claim.form, claim.role, theta, tol);
      CHECK(v.all_pass == claim.expect_pass);
    }
  }
}
