#pragma once

#include <array>
#include <optional>
#include <vector>

#include "towlab/grid.hpp"

namespace towlab {

// Gradient vector per node (central differences; interior nodes only,
// boundary entries are zero).
struct GradientField {
  GridPtr grid;
  std::vector<std::array<double, 2>> g;

  std::array<double, 2> at(int node) const { return g[static_cast<std::size_t>(node)]; }
  double norm(int node) const;
};

// Symmetric Hessian per node: (xx, xy, yy). 1D uses xx only.
struct HessianField {
  GridPtr grid;
  std::vector<std::array<double, 3>> m;

  std::array<double, 3> at(int node) const { return m[static_cast<std::size_t>(node)]; }
};

GradientField gradient(const ScalarField& u);
HessianField hessian(const ScalarField& u);

// Extremal eigenvalues of a symmetric 1x1 or 2x2 matrix (xx, xy, yy),
// via the closed form (a+c)/2 +- sqrt(((a-c)/2)^2 + b^2).
std::array<double, 2> hessian_eigenvalues(const std::array<double, 3>& m, int dim);

// p . M . p for the symmetric matrix above.
double quadratic_form(const std::array<double, 2>& p,
                      const std::array<double, 3>& m, int dim);

// Du . D2u . Du at interior nodes.
ScalarField infinity_laplacian(const ScalarField& u);

// Dinf u / |Du|^2 where |Du| >= theta; the mask is 0 where the quotient
// is not trusted.
struct MaskedField {
  ScalarField field;
  std::vector<std::uint8_t> mask;  // 1 = valid

  int valid_count() const;
};

MaskedField normalized_inf_laplacian(const ScalarField& u, double theta);

// Hamiltonian H(x[,y], z, p1[,p2]) with optional explicit partial
// derivatives. Missing derivatives fall back to central differences of
// H with the configured step. Explicit derivatives are validated
// against those differences at construction.
class HamiltonianSpec {
 public:
  struct Parts {
    FunctionSpec H;
    std::optional<FunctionSpec> Hx1, Hx2, Hz, Hp1, Hp2;
  };

  static HamiltonianSpec make(Parts parts, double fd_step = 1e-5);

  double value(const Bindings& at) const { return parts_.H.evaluate(at); }
  double dx(int axis, const Bindings& at) const;
  double dz(const Bindings& at) const;
  double dp(int axis, const Bindings& at) const;

  const FunctionSpec& h() const { return parts_.H; }
  double fd_step() const { return step_; }

 private:
  Parts parts_;
  double step_ = 1e-5;
};

// The Aronsson operator A_H(u) = H_p . D_x(H(x, u, Du)), expanded by
// the chain rule to H_p.H_x + H_z (H_p.Du) + H_p.D2u.H_p, each factor
// evaluated at (x, u(x), Du(x)). Interior nodes only.
ScalarField aronsson_apply(const HamiltonianSpec& H, const ScalarField& u);

// B(x,u,Du) . D2u . B(x,u,Du) + c(x,u,Du), component expressions over
// (x[,y], z, p1[,p2]).
struct GeneralOperatorSpec {
  std::vector<FunctionSpec> B;  // one component per axis
  FunctionSpec c;
};

ScalarField general_operator_apply(const GeneralOperatorSpec& spec,
                                   const ScalarField& u);

enum class Form { ratio, product };
enum class Role { sub, super };

const char* form_name(Form f);
const char* role_name(Role r);

// Per-interior-node outcome of the viscosity residual test.
struct NodeVerdict {
  int node = -1;
  double grad_norm = 0;
  bool degenerate = false;        // |Du| < theta
  double residual = 0;            // see viscosity_check
  std::optional<double> eigenvalue;  // extremal Hessian eigenvalue, degenerate ratio branch
  bool pass = false;
};

struct ViscosityVerdict {
  Form form = Form::ratio;
  Role role = Role::sub;
  double theta = 0, tol = 0;
  std::vector<NodeVerdict> nodes;
  int num_pass = 0, num_fail = 0, num_degenerate = 0;
  bool all_pass = false;
};

// Classifies u as a discrete sub/supersolution by differencing u itself.
//
// ratio form   Dinf u / |Du|^2 = -f :
//   non-degenerate nodes use residual = Dinf u/|Du|^2 + f;
//   degenerate nodes (|Du| < theta) use the extremal-eigenvalue branch,
//   residual = lambda_max(D2u) + f for sub, lambda_min(D2u) + f for super.
// product form Dinf u + f |Du|^2 = 0 :
//   residual = Dinf u + f |Du|^2 at every node; the operator is
//   continuous through vanishing gradients, so no eigenvalue branch.
//
// A sub verdict passes where residual >= -tol, a super verdict where
// residual <= tol.
ViscosityVerdict viscosity_check(const ScalarField& u, const ScalarField& f,
                                 Form form, Role role, double theta, double tol);

}  // namespace towlab
