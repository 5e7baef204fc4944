#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "towlab/grid.hpp"
#include "towlab/operators.hpp"

using namespace towlab;

namespace {

// Smooth field with randomized quadratic + trigonometric content.
ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng), a3 = coef(rng),
         a4 = coef(rng), a5 = coef(rng), a6 = coef(rng);
  ScalarField u(grid);
  for (int node = 0; node < grid->node_count(); ++node) {
    double x = grid->coord(node, 0);
    double y = grid->dim() == 2 ? grid->coord(node, 1) : 0.0;
    u[node] = a0 + a1 * x + a2 * y + a3 * x * x + a4 * x * y + a5 * y * y +
              a6 * std::sin(2 * x) * std::cos(y);
  }
  return u;
}

HamiltonianSpec half_p_squared(int dim) {
  HamiltonianSpec::Parts parts;
  if (dim == 1) {
    parts.H = FunctionSpec::parse("0.5*p1^2");
    parts.Hp1 = FunctionSpec::parse("p1");
  } else {
    parts.H = FunctionSpec::parse("0.5*(p1^2 + p2^2)");
    parts.Hp1 = FunctionSpec::parse("p1");
    parts.Hp2 = FunctionSpec::parse("p2");
    parts.Hx2 = FunctionSpec::parse("0");
  }
  parts.Hx1 = FunctionSpec::parse("0");
  parts.Hz = FunctionSpec::parse("0");
  return HamiltonianSpec::make(parts);
}

}  // namespace

TEST_CASE("gradient: central differences, exact on quadratics") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.025);
  ScalarField plane = sample(g, FunctionSpec::parse("x"));
  GradientField gp = gradient(plane);
  for (int node : g->interior_nodes())
    CHECK(gp.at(node)[0] == doctest::Approx(1.0).epsilon(1e-12));

  ScalarField quad = sample(g, FunctionSpec::parse("2*x - x^2"));
  GradientField gq = gradient(quad);
  int mid = g->snap(std::array<double, 1>{0.5});
  CHECK(gq.at(mid)[0] == doctest::Approx(1.0).epsilon(1e-10));

  ScalarField c(g, 3.0);
  GradientField gc = gradient(c);
  for (int node : g->interior_nodes()) CHECK(gc.at(node)[0] == 0.0);
}

TEST_CASE("hessian: exact on quadratics and bilinears") {
  GridPtr g1 = build_grid({0.0}, {1.0}, 0.1);
  HessianField h1 = hessian(sample(g1, FunctionSpec::parse("x^2")));
  for (int node : g1->interior_nodes())
    CHECK(h1.at(node)[0] == doctest::Approx(2.0).epsilon(1e-9));

  GridPtr g2 = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.25);
  HessianField h2 = hessian(sample(g2, FunctionSpec::parse("x*y")));
  for (int node : g2->interior_nodes()) {
    CHECK(h2.at(node)[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(h2.at(node)[0] == doctest::Approx(0.0).epsilon(1e-9));
  }

  HessianField hl = hessian(sample(g2, FunctionSpec::parse("1 + x - 2*y")));
  for (int node : g2->interior_nodes())
    for (int k = 0; k < 3; ++k)
      CHECK(hl.at(node)[static_cast<std::size_t>(k)] ==
            doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hessian eigenvalues satisfy the characteristic equation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 3> m{coef(rng), coef(rng), coef(rng)};
    auto [lo, hi] = hessian_eigenvalues(m, 2);
    CHECK(lo <= hi);
    double tr = m[0] + m[2], det = m[0] * m[2] - m[1] * m[1];
    CHECK(lo * lo - tr * lo + det == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(hi * hi - tr * hi + det == doctest::Approx(0.0).epsilon(1e-9));
  }
  auto [l1, l2] = hessian_eigenvalues({-2.0, 0.0, 0.0}, 1);
  CHECK(l1 == -2.0);
  CHECK(l2 == -2.0);
}

TEST_CASE("infinity laplacian on model fields") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.025);
  ScalarField sq = sample(g, FunctionSpec::parse("x^2"));
  ScalarField dinf = infinity_laplacian(sq);
  int mid = g->snap(std::array<double, 1>{0.5});
  CHECK(dinf[mid] == doctest::Approx(2.0).epsilon(1e-9));  // (u')^2 u'' = 8 x^2

  // cones are infinity harmonic away from the vertex
  GridPtr g2 = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.025);
  ScalarField cone = sample(g2, FunctionSpec::parse("sqrt((x+0.5)^2 + (y+0.5)^2)"));
  ScalarField rc = infinity_laplacian(cone);
  double sup = 0;
  for (int node : g2->interior_nodes()) sup = std::max(sup, std::fabs(rc[node]));
  CHECK(sup <= 0.025);  // vertex at (-0.5,-0.5), distance >= 0.7 from the grid
}

TEST_CASE("aronsson patch residual shrinks under refinement") {
  double prev = -1;
  for (double h : {0.02, 0.01}) {
    GridPtr g = build_grid({1.0, 1.0}, {2.0, 2.0}, h);
    ScalarField u = sample(g, FunctionSpec::parse("x^(4/3) - y^(4/3)"));
    ScalarField res = infinity_laplacian(u);
    double sup = 0;
    for (int node : g->interior_nodes()) sup = std::max(sup, std::fabs(res[node]));
    CHECK(sup <= 0.05);
    if (prev >= 0) CHECK(sup <= 0.6 * prev);
    prev = sup;
  }
}

TEST_CASE("normalized infinity laplacian") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.025);
  ScalarField u = sample(g, FunctionSpec::parse("2*x - x^2"));
  auto [q, mask] = normalized_inf_laplacian(u, 0.2);
  int node = g->snap(std::array<double, 1>{0.25});
  REQUIRE(mask[static_cast<std::size_t>(node)] == 1);
  CHECK(q[node] == doctest::Approx(-2.0).epsilon(1e-9));  // 1D: u''

  MaskedField flat = normalized_inf_laplacian(ScalarField(g, 5.0), 0.2);
  CHECK(flat.valid_count() == 0);

  MaskedField plane = normalized_inf_laplacian(sample(g, FunctionSpec::parse("x")), 0.2);
  CHECK(plane.valid_count() == static_cast<int>(g->interior_nodes().size()));
  for (int n : g->interior_nodes())
    CHECK(plane.field[n] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("aronsson operator fixtures") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.025);
  ScalarField sq = sample(g, FunctionSpec::parse("x^2"));
  int mid = g->snap(std::array<double, 1>{0.5});

  SUBCASE("H = |p|^2/2 reproduces the infinity laplacian") {
    ScalarField a = aronsson_apply(half_p_squared(1), sq);
    CHECK(a[mid] == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("H = |p|^2/2 + z adds |Du|^2") {
    HamiltonianSpec::Parts parts;
    parts.H = FunctionSpec::parse("0.5*p1^2 + z");
    parts.Hx1 = FunctionSpec::parse("0");
    parts.Hz = FunctionSpec::parse("1");
    parts.Hp1 = FunctionSpec::parse("p1");
    ScalarField a = aronsson_apply(HamiltonianSpec::make(parts), sq);
    CHECK(a[mid] == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("numeric derivatives agree with explicit ones") {
    HamiltonianSpec::Parts parts;
    parts.H = FunctionSpec::parse("0.5*p1^2 + z");
    ScalarField a = aronsson_apply(HamiltonianSpec::make(parts), sq);
    CHECK(a[mid] == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("linear fields are aronsson-null for gradient Hamiltonians") {
    ScalarField lin = sample(g, FunctionSpec::parse("3*x - 1"));
    ScalarField a = aronsson_apply(half_p_squared(1), lin);
    for (int node : g->interior_nodes())
      CHECK(a[node] == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("hamiltonian derivative validation rejects wrong expressions") {
  HamiltonianSpec::Parts parts;
  parts.H = FunctionSpec::parse("0.5*p1^2");
  parts.Hp1 = FunctionSpec::parse("p1 + 0.1");
  CHECK_THROWS_AS(HamiltonianSpec::make(parts), Error);
}

TEST_CASE("dimension mismatches are rejected up front") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField u = sample(g, FunctionSpec::parse("x^2"));
  CHECK_THROWS_AS(aronsson_apply(half_p_squared(2), u), Error);
  GeneralOperatorSpec spec{{FunctionSpec::parse("p2")}, FunctionSpec::parse("0")};
  CHECK_THROWS_AS(general_operator_apply(spec, u), Error);
}

TEST_CASE("general operator fixtures") {
  GridPtr g2 = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.05);
  ScalarField u = sample(g2, FunctionSpec::parse("x^2 + y"));

  SUBCASE("B = (1,0), c = 0 extracts u_xx") {
    GeneralOperatorSpec spec{{FunctionSpec::parse("1"), FunctionSpec::parse("0")},
                             FunctionSpec::parse("0")};
    ScalarField r = general_operator_apply(spec, u);
    for (int node : g2->interior_nodes())
      CHECK(r[node] == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("B = 0, c = z returns the field itself") {
    GeneralOperatorSpec spec{{FunctionSpec::parse("0"), FunctionSpec::parse("0")},
                             FunctionSpec::parse("z")};
    ScalarField r = general_operator_apply(spec, u);
    for (int node : g2->interior_nodes())
      CHECK(r[node] == doctest::Approx(u[node]).epsilon(1e-12));
  }
  SUBCASE("component count must match the dimension") {
    GeneralOperatorSpec spec{{FunctionSpec::parse("1")}, FunctionSpec::parse("0")};
    CHECK_THROWS_AS(general_operator_apply(spec, u), Error);
  }
}

TEST_CASE("operator identities on random smooth fields") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10; ++i) {
    GridPtr g = i % 2 == 0 ? build_grid({0.0, 0.0}, {1.0, 1.0}, 0.1)
                           : build_grid({0.0}, {1.0}, 0.05);
    ScalarField u = random_smooth_field(g, rng);
    ScalarField dinf = infinity_laplacian(u);

    ScalarField a = aronsson_apply(half_p_squared(g->dim()), u);
    GeneralOperatorSpec idspec{
        g->dim() == 2
            ? std::vector<FunctionSpec>{FunctionSpec::parse("p1"), FunctionSpec::parse("p2")}
            : std::vector<FunctionSpec>{FunctionSpec::parse("p1")},
        FunctionSpec::parse("0")};
    ScalarField b = general_operator_apply(idspec, u);
    for (int node : g->interior_nodes()) {
      CHECK(std::fabs(a[node] - dinf[node]) <= 1e-10);
      CHECK(std::fabs(b[node] - dinf[node]) <= 1e-10);
    }
  }
}

TEST_CASE("viscosity check: the zero counterexample") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField zero(g, 0.0);
  ScalarField minus1 = sample(g, FunctionSpec::parse("-1"));
  const double theta = std::sqrt(0.1);

  ViscosityVerdict psub = viscosity_check(zero, minus1, Form::product, Role::sub, theta, 0.0);
  ViscosityVerdict psup = viscosity_check(zero, minus1, Form::product, Role::super, theta, 0.0);
  CHECK(psub.all_pass);
  CHECK(psup.all_pass);

  ViscosityVerdict rsub = viscosity_check(zero, minus1, Form::ratio, Role::sub, theta, 0.0);
  CHECK(rsub.num_pass == 0);
  CHECK(rsub.num_fail == static_cast<int>(g->interior_nodes().size()));
  CHECK(rsub.num_degenerate == rsub.num_fail);
  for (const auto& nv : rsub.nodes) {
    REQUIRE(nv.eigenvalue.has_value());
    CHECK(*nv.eigenvalue == 0.0);
    CHECK(nv.residual == -1.0);
  }

  ViscosityVerdict rsup = viscosity_check(zero, minus1, Form::ratio, Role::super, theta, 0.0);
  CHECK(rsup.all_pass);
}

TEST_CASE("viscosity check: ratio solutions for constant cost") {
  const double h = 0.025;
  GridPtr g = build_grid({0.0}, {1.0}, h);
  ScalarField f2 = sample(g, FunctionSpec::parse("2"));
  const double theta = std::sqrt(h);
  const double tol = 10 * h * h;

  SUBCASE("2x - x^2: degenerate branch fires near x = 1") {
    ScalarField u = sample(g, FunctionSpec::parse("2*x - x^2"));
    for (Role role : {Role::sub, Role::super}) {
      ViscosityVerdict v = viscosity_check(u, f2, Form::ratio, role, theta, tol);
      CHECK(v.all_pass);
      CHECK(v.num_degenerate > 0);
    }
  }
  SUBCASE("x - x^2: interior vanishing gradient at x = 0.5") {
    ScalarField u = sample(g, FunctionSpec::parse("x - x^2"));
    int mid = g->snap(std::array<double, 1>{0.5});
    for (Role role : {Role::sub, Role::super}) {
      ViscosityVerdict v = viscosity_check(u, f2, Form::ratio, role, theta, tol);
      CHECK(v.all_pass);
      for (const auto& nv : v.nodes)
        if (nv.node == mid) {
          CHECK(nv.degenerate);
          REQUIRE(nv.eigenvalue.has_value());
          CHECK(*nv.eigenvalue == doctest::Approx(-2.0).epsilon(1e-9));
        }
    }
  }
}

TEST_CASE("ratio pass implies product pass at matched tolerance") {
  std::mt19937_64 rng(1234);
  GridPtr g = build_grid({0.0, 0.0}, {1.0, 1.0}, 0.1);
  const double theta = 0.05, tol = 0.5;
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField u = random_smooth_field(g, rng);
    ScalarField f(g, std::uniform_real_distribution<double>(-2, 2)(rng));
    for (Role role : {Role::sub, Role::super}) {
      ViscosityVerdict ratio = viscosity_check(u, f, Form::ratio, role, theta, tol);
      ViscosityVerdict product = viscosity_check(u, f, Form::product, role, theta, 0.0);
      for (std::size_t i = 0; i < ratio.nodes.size(); ++i) {
        const auto& rn = ratio.nodes[i];
        if (rn.degenerate || !rn.pass) continue;
        double scaled = tol * rn.grad_norm * rn.grad_norm + 1e-12;
        const auto& pn = product.nodes[i];
        if (role == Role::sub)
          CHECK(pn.residual >= -scaled);
        else
          CHECK(pn.residual <= scaled);
      }
    }
  }
}

TEST_CASE("degenerate flag matches the gradient threshold exactly") {
  GridPtr g = build_grid({0.0}, {1.0}, 0.1);
  ScalarField u = sample(g, FunctionSpec::parse("x^2"));
  ScalarField f0(g, 0.0);
  ViscosityVerdict v = viscosity_check(u, f0, Form::ratio, Role::sub, 0.5, 1.0);
  GradientField grad = gradient(u);
  for (const auto& nv : v.nodes)
    CHECK(nv.degenerate == (grad.norm(nv.node) < 0.5));
}
