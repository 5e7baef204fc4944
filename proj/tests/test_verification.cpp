#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "towlab/solutions.hpp"
#include "towlab/verify.hpp"

using namespace towlab;

TEST_CASE("cost recovery is exact on sampled quadratics") {
  const double h = 0.025;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  ScalarField u = sample(g, FunctionSpec::parse("2*x - x^2"));
  ScalarField ref = sample(g, FunctionSpec::parse("2"));
  RecoveryReport rep = recover_cost(u, std::sqrt(h), &ref);

  REQUIRE(rep.sup_error.has_value());
  CHECK(*rep.sup_error <= 1e-11);
  CHECK(rep.coverage > 0.8);
  CHECK(rep.coverage < 1.0);
  // the gradient 2-2x dies at x = 1: that end must be masked out
  int near_one = g->snap(std::array<double, 1>{1.0 - h});
  CHECK(rep.recovered.mask[static_cast<std::size_t>(near_one)] == 0);
  CHECK(rep.warning.empty());
}

TEST_CASE("cost recovery masks the interior critical point of x - x^2") {
  const double h = 0.025;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  ScalarField u = sample(g, FunctionSpec::parse("x - x^2"));
  ScalarField ref = sample(g, FunctionSpec::parse("2"));
  RecoveryReport rep = recover_cost(u, std::sqrt(h), &ref);
  CHECK(*rep.sup_error <= 1e-11);
  int mid = g->snap(std::array<double, 1>{0.5});
  CHECK(rep.recovered.mask[static_cast<std::size_t>(mid)] == 0);
}

TEST_CASE("recovery from a constant field reports empty coverage") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  RecoveryReport rep = recover_cost(ScalarField(g, 7.0), 0.3);
  CHECK(rep.coverage == 0.0);
  CHECK_FALSE(rep.warning.empty());
  CHECK_FALSE(rep.sup_error.has_value());
}

TEST_CASE("uniqueness gap for distinct constant costs") {
  const double h = 0.05;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  UniquenessReport rep = uniqueness_experiment(
      FunctionSpec::parse("1"), FunctionSpec::parse("2"), FunctionSpec::parse("0"),
      g, h, 1e-10, 200000);
  REQUIRE(rep.gap.has_value());
  // oracle: x(1-x)/2 vs x(1-x); the difference peaks at 0.125 in the middle
  CHECK(*rep.gap == doctest::Approx(0.125).epsilon(0.02));
  CHECK(g->coord(rep.gap_node, 0) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.regime_f == SignRegime::positive);

  UniquenessReport swapped = uniqueness_experiment(
      FunctionSpec::parse("2"), FunctionSpec::parse("1"), FunctionSpec::parse("0"),
      g, h, 1e-10, 200000);
  CHECK(*swapped.gap == *rep.gap);
}

TEST_CASE("identical costs give a vanishing gap") {
  const double h = 0.05, tol = 1e-10;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  UniquenessReport rep = uniqueness_experiment(
      FunctionSpec::parse("1"), FunctionSpec::parse("1"), FunctionSpec::parse("0"),
      g, h, tol, 200000);
  REQUIRE(rep.gap.has_value());
  CHECK(*rep.gap <= 2 * tol);
}

TEST_CASE("a ten percent cost change is visible above tolerance") {
  const double h = 0.025, tol = 1e-10;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  UniquenessReport rep = uniqueness_experiment(
      FunctionSpec::parse("1"), FunctionSpec::parse("1.1"), FunctionSpec::parse("0"),
      g, h, tol, 200000);
  REQUIRE(rep.gap.has_value());
  CHECK(*rep.gap > 5 * tol);
  CHECK(*rep.gap == doctest::Approx(0.0125 * 0.5).epsilon(0.2));  // 0.05 x(1-x) at 0.5
}

TEST_CASE("non-convergence omits the gap") {
  const double h = 0.05;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  UniquenessReport rep = uniqueness_experiment(
      FunctionSpec::parse("1"), FunctionSpec::parse("2"), FunctionSpec::parse("0"),
      g, h, 1e-14, 3);
  CHECK_FALSE(rep.gap.has_value());
  CHECK_FALSE(rep.stats_f.converged);
}

TEST_CASE("doubling maximizer for the plane: offset epsilon, value epsilon/2 - penalty") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  DoublingReport rep = doubling_diagnostic(u, u, 0.2);
  // several pairs tie up to rounding; the offset and value are pinned
  CHECK(std::fabs(rep.gap - 0.2) <= 1e-12);
  CHECK(std::fabs(rep.w_max - 0.1) <= 1e-15);
  CHECK(rep.gap_over_eps == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(g->coord(rep.x_node, 0) - g->coord(rep.y_node, 0) ==
        doctest::Approx(0.2).epsilon(1e-11));
}

TEST_CASE("a huge epsilon drops the penalty and spans the domain") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  DoublingReport rep = doubling_diagnostic(u, u, 10.0);
  CHECK(rep.gap == 1.0);
  CHECK(rep.w_max == doctest::Approx(1.0 - 1.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("doubling gap obeys the Lipschitz bound on model fields") {
  const double h = 0.025;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  for (const char* expr : {"x", "x^2", "2*x - x^2", "abs(x - 0.475)"}) {
    ScalarField u = sample(g, FunctionSpec::parse(expr));
    double lip = lipschitz_estimate(u);
    for (double eps : {0.05, 0.1, 0.2}) {
      INFO(expr, " eps=", eps);
      DoublingReport rep = doubling_diagnostic(u, u, eps);
      CHECK(rep.gap <= lip * eps + h + 1e-12);
      CHECK(rep.w_max >= -1e-12);  // w(x,x) = 0 is always available
    }
  }
}

TEST_CASE("operator residuals on exact solutions pin the right-hand side") {
  // a field solving L(u) = f cannot also pass as a solution of
  // L(u) = g for g != f: the residual against the wrong cost stays
  // bounded away from zero at every interior node
  SUBCASE("infinity laplacian on the aronsson patch") {
    GridPtr g = build_grid({1.0, 1.0}, {2.0, 2.0}, 0.01);
    ScalarField u = sample(g, FunctionSpec::parse("x^(4/3) - y^(4/3)"));
    ScalarField res = infinity_laplacian(u);
    double sup_vs_zero = 0, inf_vs_shift = 1e30;
    for (int node : g->interior_nodes()) {
      sup_vs_zero = std::max(sup_vs_zero, std::fabs(res[node]));
      inf_vs_shift = std::min(inf_vs_shift, std::fabs(res[node] - 0.1));
    }
    CHECK(sup_vs_zero <= 0.01);
    CHECK(inf_vs_shift >= 0.09);
  }
  SUBCASE("general operator with an axis direction field") {
    GridPtr g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.05);
    ScalarField u = sample(g, FunctionSpec::parse("x^2 + y"));
    GeneralOperatorSpec spec{{FunctionSpec::parse("1"), FunctionSpec::parse("0")},
                             FunctionSpec::parse("0")};
    ScalarField res = general_operator_apply(spec, u);
    double sup_vs_two = 0, inf_vs_shift = 1e30;
    for (int node : g->interior_nodes()) {
      sup_vs_two = std::max(sup_vs_two, std::fabs(res[node] - 2.0));
      inf_vs_shift = std::min(inf_vs_shift, std::fabs(res[node] - 2.1));
    }
    CHECK(sup_vs_two <= 1e-9);
    CHECK(inf_vs_shift >= 0.0999);
  }
}

TEST_CASE("doubling between a shifted copy and the original adds the shift") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  ScalarField shifted = sample(g, FunctionSpec::parse("x + 0.3"));
  DoublingReport rep = doubling_diagnostic(shifted, u, 0.2);
  // w = (x + s) - y - d^2/(2 eps): the shift rides on top of the
  // unshifted maximum s + eps/2
  CHECK(rep.w_max == doctest::Approx(0.3 + 0.1).epsilon(1e-12));
  CHECK(std::fabs(rep.gap - 0.2) <= 1e-12);
}

TEST_CASE("lipschitz estimate of the plane is its slope") {
  GridPtr g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.25);
  CHECK(lipschitz_estimate(sample(g, FunctionSpec::parse("x"))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lipschitz_estimate(sample(g, FunctionSpec::parse("3*y"))) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("slope of a cone about its vertex is one at every radius") {
  GridPtr g = build_grid({-1.0, -1.0}, {1.0, 1.0}, 0.05);
  ScalarField u = sample(g, FunctionSpec::parse("sqrt(x^2 + y^2)"));
  int vertex = g->snap(std::array<double, 2>{0.0, 0.0});
  SlopeReport rep = slope_analysis(u, vertex, {0.1, 0.2, 0.3, 0.4});
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) CHECK(e.slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.monotone);
  CHECK(rep.endpoint[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.endpoint[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.endpoint[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slope of x^2 about the origin grows linearly") {
  GridPtr g = build_grid({-1.0}, {1.0}, 0.05);
  ScalarField u = sample(g, FunctionSpec::parse("x^2"));
  int origin = g->snap(std::array<double, 1>{0.0});
  SlopeReport rep = slope_analysis(u, origin, {0.1, 0.2, 0.3, 0.4});
  for (const auto& e : rep.entries) CHECK(e.slope == doctest::Approx(e.r).epsilon(1e-9));
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    CHECK(rep.entries[i].slope > rep.entries[i - 1].slope);
  CHECK(rep.monotone);
  CHECK(rep.s_plus_center == doctest::Approx(0.1).epsilon(1e-9));
  // the argmax sits at |x| = r; its local slope is about 2r
  CHECK(rep.endpoint[0] == doctest::Approx(2 * 0.4).epsilon(0.2));
  CHECK(rep.endpoint[0] >= rep.endpoint[1] - 0.05);
  CHECK(rep.endpoint[1] >= rep.endpoint[2] - 0.05);
}

TEST_CASE("slope of a plane is one at any center") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.05);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  int center = g->snap(std::array<double, 1>{0.5});
  SlopeReport rep = slope_analysis(u, center, {0.25});
  CHECK(rep.entries[0].slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.endpoint[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.endpoint[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slope analysis rejects balls that leave the grid") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.05);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  int center = g->snap(std::array<double, 1>{0.5});
  CHECK_THROWS_WITH_AS(slope_analysis(u, center, {0.6}),
                       doctest::Contains("0.6"), Error);
  CHECK_THROWS_AS(slope_analysis(u, center, {0.2, 0.1}), Error);  // not increasing
  CHECK_THROWS_AS(slope_analysis(u, center, {0.02}), Error);  // below h
}

TEST_CASE("slope monotonicity holds for catalog subsolutions") {
  struct Pick {
    const char* name;
    std::array<double, 2> center;
  };
  const Pick picks[] = {{"plane", {0.5, 0}},
                        {"plane2d", {0.5, 0.5}},
                        {"cone", {0.0, 0.0}},
                        {"aronsson43", {1.5, 1.5}},
                        {"parabola", {0.0, 0}}};
  for (const auto& pick : picks) {
    const ReferenceSolution* s = find_solution(pick.name);
    REQUIRE(s != nullptr);
    const double h = s->dim == 1 ? 0.025 : 0.05;
    GridPtr g = s->dim == 1
                    ? build_grid({s->default_domain.lo[0]}, {s->default_domain.hi[0]}, h)
                    : build_grid({s->default_domain.lo[0], s->default_domain.lo[1]},
                                 {s->default_domain.hi[0], s->default_domain.hi[1]}, h);
    ScalarField u = sample(g, s->fn());
    int center = g->snap(std::span<const double>(pick.center.data(),
                                                 static_cast<std::size_t>(s->dim)));
    SlopeReport rep = slope_analysis(u, center, {0.1, 0.2, 0.3});
    INFO(pick.name);
    CHECK(rep.monotone);
    CHECK(rep.endpoint[0] >= rep.endpoint[1] - h - 1e-12);
    CHECK(rep.endpoint[1] >= rep.endpoint[2] - h - 1e-12);
  }
}

TEST_CASE("planes pass cone comparison on both sides") {
  GridPtr g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.05);
  ScalarField u = sample(g, FunctionSpec::parse("x"));
  Box V = Box::rect(0.25, 0.25, 0.75, 0.75);
  for (ConeSide side : {ConeSide::above, ConeSide::below}) {
    ConeComparisonReport rep = cone_comparison_check(u, V, side, 0.05);
    INFO(cone_side_name(side));
    CHECK(rep.pass);
    CHECK(rep.worst_violation <= 0.05);
  }
}

TEST_CASE("the aronsson solution passes cone comparison") {
  const double h = 0.025;
  GridPtr g = build_grid({1.0, 1.0}, {2.0, 2.0}, h);
  ScalarField u = sample(g, FunctionSpec::parse("x^(4/3) - y^(4/3)"));
  Box V = Box::rect(1.25, 1.25, 1.75, 1.75);
  for (ConeSide side : {ConeSide::above, ConeSide::below}) {
    ConeComparisonReport rep = cone_comparison_check(u, V, side, 2 * h);
    INFO(cone_side_name(side));
    CHECK(rep.pass);
  }
}

TEST_CASE("the bowl violates cone comparison from below") {
  const double h = 0.02;
  GridPtr g = build_grid({-1.0, -1.0}, {1.0, 1.0}, h);
  ScalarField u = sample(g, FunctionSpec::parse("x^2 + y^2"));
  Box V = Box::rect(-0.5, -0.5, 0.5, 0.5);

  ConeComparisonReport below = cone_comparison_check(u, V, ConeSide::below, 2 * h);
  CHECK_FALSE(below.pass);
  CHECK(below.worst_violation > 10 * h);
  // oracle lower bound: the flat cone at the boundary minimum already
  // violates by min u on the ring minus u at the bowl bottom = 0.25
  CHECK(below.worst_violation >= 0.25 - 1e-9);

  ConeComparisonReport above = cone_comparison_check(u, V, ConeSide::above, 2 * h);
  CHECK(above.pass);  // the bowl is a subsolution, so domination survives
}
