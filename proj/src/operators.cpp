#include "towlab/operators.hpp"

#include <cmath>
#include <random>

namespace towlab {

double GradientField::norm(int node) const {
  auto v = g[static_cast<std::size_t>(node)];
  return std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

GradientField gradient(const ScalarField& u) {
  const Grid& grid = u.grid();
  GradientField out{u.grid_ptr(), std::vector<std::array<double, 2>>(
                                      static_cast<std::size_t>(grid.node_count()),
                                      {0.0, 0.0})};
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  const int sx = 1, sy = grid.nx();
  for (int node : grid.interior_nodes()) {
    auto& g = out.g[static_cast<std::size_t>(node)];
    g[0] = (u[node + sx] - u[node - sx]) * inv2h;
    if (grid.dim() == 2) g[1] = (u[node + sy] - u[node - sy]) * inv2h;
  }
  return out;
}

HessianField hessian(const ScalarField& u) {
  const Grid& grid = u.grid();
  HessianField out{u.grid_ptr(), std::vector<std::array<double, 3>>(
                                     static_cast<std::size_t>(grid.node_count()),
                                     {0.0, 0.0, 0.0})};
  const double h = grid.spacing();
  const double invh2 = 1.0 / (h * h);
  const int sx = 1, sy = grid.nx();
  for (int node : grid.interior_nodes()) {
    auto& m = out.m[static_cast<std::size_t>(node)];
    m[0] = (u[node + sx] - 2.0 * u[node] + u[node - sx]) * invh2;
    if (grid.dim() == 2) {
      m[2] = (u[node + sy] - 2.0 * u[node] + u[node - sy]) * invh2;
      // 4-point centered cross stencil
      m[1] = (u[node + sx + sy] - u[node + sx - sy] - u[node - sx + sy] +
              u[node - sx - sy]) *
             (0.25 * invh2);
    }
  }
  return out;
}

std::array<double, 2> hessian_eigenvalues(const std::array<double, 3>& m, int dim) {
  if (dim == 1) return {m[0], m[0]};
  double mean = 0.5 * (m[0] + m[2]);
  double rad = std::sqrt(0.25 * (m[0] - m[2]) * (m[0] - m[2]) + m[1] * m[1]);
  return {mean - rad, mean + rad};
}

double quadratic_form(const std::array<double, 2>& p,
                      const std::array<double, 3>& m, int dim) {
  double q = p[0] * p[0] * m[0];
  if (dim == 2) q += 2.0 * p[0] * p[1] * m[1] + p[1] * p[1] * m[2];
  return q;
}

ScalarField infinity_laplacian(const ScalarField& u) {
  const Grid& grid = u.grid();
  GradientField g = gradient(u);
  HessianField hess = hessian(u);
  ScalarField out(u.grid_ptr(), 0.0);
  for (int node : grid.interior_nodes())
    out[node] = quadratic_form(g.at(node), hess.at(node), grid.dim());
  return out;
}

int MaskedField::valid_count() const {
  int n = 0;
  for (auto m : mask) n += m != 0;
  return n;
}

MaskedField normalized_inf_laplacian(const ScalarField& u, double theta) {
  if (!(theta > 0.0)) throw Error("theta must be positive");
  const Grid& grid = u.grid();
  GradientField g = gradient(u);
  HessianField hess = hessian(u);
  MaskedField out{ScalarField(u.grid_ptr(), 0.0),
                  std::vector<std::uint8_t>(static_cast<std::size_t>(grid.node_count()), 0)};
  for (int node : grid.interior_nodes()) {
    double gn = g.norm(node);
    if (gn >= theta) {
      auto p = g.at(node);
      out.field[node] = quadratic_form(p, hess.at(node), grid.dim()) / (gn * gn);
      out.mask[static_cast<std::size_t>(node)] = 1;
    }
  }
  return out;
}

HamiltonianSpec HamiltonianSpec::make(Parts parts, double fd_step) {
  if (!(fd_step > 0.0)) throw Error("finite-difference step must be positive");
  HamiltonianSpec spec;
  spec.parts_ = std::move(parts);
  spec.step_ = fd_step;

  // Validate any explicit derivative against central differences of H at
  // random probe points where H evaluates finitely.
  struct Probe { const std::optional<FunctionSpec>* fn; Var var; const char* name; };
  const Probe probes[] = {
      {&spec.parts_.Hx1, Var::x, "Hx1"},  {&spec.parts_.Hx2, Var::y, "Hx2"},
      {&spec.parts_.Hz, Var::z, "Hz"},    {&spec.parts_.Hp1, Var::p1, "Hp1"},
      {&spec.parts_.Hp2, Var::p2, "Hp2"},
  };
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int checked = 0, attempts = 0;
  while (checked < 10 && attempts < 1000) {
    ++attempts;
    Bindings b;
    b.set(Var::x, unit(rng)).set(Var::y, unit(rng)).set(Var::z, unit(rng));
    b.set(Var::p1, 2.0 * unit(rng)).set(Var::p2, 2.0 * unit(rng));
    try {
      for (const Probe& p : probes) {
        if (!p.fn->has_value()) continue;
        double expl = (*p.fn)->evaluate(b);
        double fd = finite_difference(spec.parts_.H, b, p.var, fd_step);
        if (std::fabs(expl - fd) > 1e-4 * std::max(1.0, std::fabs(fd)))
          throw Error(std::string("explicit derivative ") + p.name +
                      " disagrees with central differences of H (" +
                      std::to_string(expl) + " vs " + std::to_string(fd) + ")");
      }
    } catch (const EvalError&) {
      continue;  // probe landed outside the Hamiltonian's domain, redraw
    }
    ++checked;
  }
  return spec;
}

double HamiltonianSpec::dx(int axis, const Bindings& at) const {
  const auto& fn = axis == 0 ? parts_.Hx1 : parts_.Hx2;
  if (fn) return fn->evaluate(at);
  return finite_difference(parts_.H, at, axis == 0 ? Var::x : Var::y, step_);
}

double HamiltonianSpec::dz(const Bindings& at) const {
  if (parts_.Hz) return parts_.Hz->evaluate(at);
  return finite_difference(parts_.H, at, Var::z, step_);
}

double HamiltonianSpec::dp(int axis, const Bindings& at) const {
  const auto& fn = axis == 0 ? parts_.Hp1 : parts_.Hp2;
  if (fn) return fn->evaluate(at);
  return finite_difference(parts_.H, at, axis == 0 ? Var::p1 : Var::p2, step_);
}

namespace {

Bindings node_bindings(const Grid& grid, int node, double z,
                       const std::array<double, 2>& p) {
  Bindings b;
  b.set(Var::x, grid.coord(node, 0));
  if (grid.dim() == 2) b.set(Var::y, grid.coord(node, 1));
  b.set(Var::z, z).set(Var::p1, p[0]);
  if (grid.dim() == 2) b.set(Var::p2, p[1]);
  return b;
}

void require_arity(const FunctionSpec& fn, int dim, const char* what) {
  if (dim == 1 && (fn.uses(Var::y) || fn.uses(Var::p2)))
    throw Error(std::string(what) + " '" + fn.source() +
                "' reads y or p2 but the grid is one-dimensional");
}

}  // namespace

ScalarField aronsson_apply(const HamiltonianSpec& H, const ScalarField& u) {
  const Grid& grid = u.grid();
  require_arity(H.h(), grid.dim(), "Hamiltonian");
  GradientField g = gradient(u);
  HessianField hess = hessian(u);
  ScalarField out(u.grid_ptr(), 0.0);
  for (int node : grid.interior_nodes()) {
    auto du = g.at(node);
    Bindings b = node_bindings(grid, node, u[node], du);
    std::array<double, 2> hp{H.dp(0, b), grid.dim() == 2 ? H.dp(1, b) : 0.0};
    double hp_dot_hx = hp[0] * H.dx(0, b);
    if (grid.dim() == 2) hp_dot_hx += hp[1] * H.dx(1, b);
    double hp_dot_du = hp[0] * du[0] + hp[1] * du[1];
    out[node] = hp_dot_hx + H.dz(b) * hp_dot_du +
                quadratic_form(hp, hess.at(node), grid.dim());
  }
  return out;
}

ScalarField general_operator_apply(const GeneralOperatorSpec& spec,
                                   const ScalarField& u) {
  const Grid& grid = u.grid();
  if (static_cast<int>(spec.B.size()) != grid.dim())
    throw Error("B component count must equal the grid dimension");
  for (const FunctionSpec& b : spec.B) require_arity(b, grid.dim(), "B component");
  require_arity(spec.c, grid.dim(), "c");
  GradientField g = gradient(u);
  HessianField hess = hessian(u);
  ScalarField out(u.grid_ptr(), 0.0);
  for (int node : grid.interior_nodes()) {
    Bindings b = node_bindings(grid, node, u[node], g.at(node));
    std::array<double, 2> bv{spec.B[0].evaluate(b),
                             grid.dim() == 2 ? spec.B[1].evaluate(b) : 0.0};
    out[node] = quadratic_form(bv, hess.at(node), grid.dim()) + spec.c.evaluate(b);
  }
  return out;
}

const char* form_name(Form f) { return f == Form::ratio ? "ratio" : "product"; }
const char* role_name(Role r) { return r == Role::sub ? "sub" : "super"; }

ViscosityVerdict viscosity_check(const ScalarField& u, const ScalarField& f,
                                 Form form, Role role, double theta, double tol) {
  if (!(theta > 0.0)) throw Error("theta must be positive");
  if (tol < 0.0) throw Error("tol must be nonnegative");
  const Grid& grid = u.grid();
  GradientField g = gradient(u);
  HessianField hess = hessian(u);

  ViscosityVerdict verdict;
  verdict.form = form;
  verdict.role = role;
  verdict.theta = theta;
  verdict.tol = tol;
  verdict.nodes.reserve(grid.interior_nodes().size());

  for (int node : grid.interior_nodes()) {
    NodeVerdict nv;
    nv.node = node;
    nv.grad_norm = g.norm(node);
    nv.degenerate = nv.grad_norm < theta;
    double dinf = quadratic_form(g.at(node), hess.at(node), grid.dim());

    if (form == Form::product) {
      nv.residual = dinf + f[node] * nv.grad_norm * nv.grad_norm;
    } else if (!nv.degenerate) {
      nv.residual = dinf / (nv.grad_norm * nv.grad_norm) + f[node];
    } else {
      auto eigs = hessian_eigenvalues(hess.at(node), grid.dim());
      double lambda = role == Role::sub ? eigs[1] : eigs[0];
      nv.eigenvalue = lambda;
      nv.residual = lambda + f[node];
    }
    nv.pass = role == Role::sub ? nv.residual >= -tol : nv.residual <= tol;

    verdict.num_degenerate += nv.degenerate;
    (nv.pass ? verdict.num_pass : verdict.num_fail)++;
    verdict.nodes.push_back(nv);
  }
  verdict.all_pass = verdict.num_fail == 0;
  return verdict;
}

}  // namespace towlab
