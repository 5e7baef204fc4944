#include "towlab/solutions.hpp"

namespace towlab {

namespace {

std::vector<ReferenceSolution> build_catalog() {
  std::vector<ReferenceSolution> cat;

  {
    ReferenceSolution s;
    s.name = "plane";
    s.expr_text = "x";
    s.dim = 1;
    s.default_domain = Box::interval(0, 1);
    s.claims = {{Form::ratio, Role::sub, "0", true},
                {Form::ratio, Role::super, "0", true},
                {Form::product, Role::sub, "0", true},
                {Form::product, Role::super, "0", true}};
    s.notes = "infinity harmonic; exact fixed point of the ball update";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "plane2d";
    s.expr_text = "0.6*x + 0.8*y";
    s.dim = 2;
    s.default_domain = Box::rect(0, 0, 1, 1);
    s.claims = {{Form::ratio, Role::sub, "0", true},
                {Form::ratio, Role::super, "0", true},
                {Form::product, Role::sub, "0", true},
                {Form::product, Role::super, "0", true}};
    s.notes = "unit-gradient plane, not axis aligned";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "cone";
    s.expr_text = "sqrt(x^2 + y^2)";
    s.dim = 2;
    s.default_domain = Box::rect(-1, -1, 1, 1);
    s.smooth_region = Box::rect(0.25, 0.25, 0.875, 0.875);
    s.tol_scale = 100.0;  // third derivatives grow like 1/|x|^2
    s.claims = {{Form::ratio, Role::sub, "0", true},
                {Form::ratio, Role::super, "0", true},
                {Form::product, Role::sub, "0", true},
                {Form::product, Role::super, "0", true}};
    s.notes = "infinity harmonic away from the vertex at the origin";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "aronsson43";
    s.expr_text = "x^(4/3) - y^(4/3)";
    s.dim = 2;
    s.default_domain = Box::rect(1, 1, 2, 2);
    s.claims = {{Form::ratio, Role::sub, "0", true},
                {Form::ratio, Role::super, "0", true},
                {Form::product, Role::sub, "0", true},
                {Form::product, Role::super, "0", true}};
    s.notes =
        "infinity harmonic; smooth away from the coordinate axes, only "
        "C^(1,1/3) across them, so the domain keeps x,y >= 1";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "zero-counterexample";
    s.expr_text = "0";
    s.dim = 1;
    s.default_domain = Box::interval(0, 1);
    s.claims = {{Form::product, Role::sub, "-1", true},
                {Form::product, Role::super, "-1", true},
                {Form::ratio, Role::sub, "-1", false},
                {Form::ratio, Role::super, "-1", true}};
    s.notes =
        "u = 0 solves the product form with f = -1 but is not a ratio-form "
        "subsolution: the vanishing-gradient branch demands a Hessian "
        "eigenvalue >= 1";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "quad-f2";
    s.expr_text = "2*x - x^2";
    s.dim = 1;
    s.default_domain = Box::interval(0, 1);
    s.claims = {{Form::ratio, Role::sub, "2", true},
                {Form::ratio, Role::super, "2", true},
                {Form::product, Role::sub, "2", true},
                {Form::product, Role::super, "2", true}};
    s.notes =
        "ratio-form solution for f = 2; the gradient decays toward x = 1, so "
        "nodes near that end exercise the eigenvalue branch with equality";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "quad-sym";
    s.expr_text = "x - x^2";
    s.dim = 1;
    s.default_domain = Box::interval(0, 1);
    s.claims = {{Form::ratio, Role::sub, "2", true},
                {Form::ratio, Role::super, "2", true},
                {Form::product, Role::sub, "2", true},
                {Form::product, Role::super, "2", true}};
    s.notes =
        "ratio-form solution for f = 2 with an interior vanishing gradient at "
        "x = 0.5, where both eigenvalue branches hold with equality";
    cat.push_back(std::move(s));
  }
  {
    ReferenceSolution s;
    s.name = "parabola";
    s.expr_text = "x^2";
    s.dim = 1;
    s.default_domain = Box::interval(-1, 1);
    s.claims = {{Form::ratio, Role::sub, "0", true},
                {Form::product, Role::sub, "0", true},
                {Form::ratio, Role::super, "0", false},
                {Form::product, Role::super, "0", false}};
    s.notes = "strict subsolution; slope about 0 grows linearly in the radius";
    cat.push_back(std::move(s));
  }
  return cat;
}

}  // namespace

const std::vector<ReferenceSolution>& catalog() {
  static const std::vector<ReferenceSolution> cat = build_catalog();
  return cat;
}

const ReferenceSolution* find_solution(const std::string& name) {
  for (const auto& s : catalog())
    if (s.name == name) return &s;
  return nullptr;
}

FunctionSpec resolve_function(const std::string& text) {
  if (const ReferenceSolution* s = find_solution(text)) return s->fn();
  return FunctionSpec::parse(text);
}

}  // namespace towlab
