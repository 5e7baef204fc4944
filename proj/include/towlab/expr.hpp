#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace towlab {

// Variables an expression may reference. x, y are spatial coordinates,
// z is the field value, p1, p2 are gradient components, r is a free
// scalar slot (radii, parameters).
enum class Var : int { x = 0, y = 1, z = 2, p1 = 3, p2 = 4, r = 5 };

inline constexpr int kVarCount = 6;
const char* var_name(Var v);

// A set of variable bindings for evaluation. Only variables that have
// been set() count as provided; evaluating an expression that reads an
// unbound variable is an error.
struct Bindings {
  std::array<double, kVarCount> values{};
  unsigned provided = 0;

  Bindings& set(Var v, double value) {
    values[static_cast<int>(v)] = value;
    provided |= 1u << static_cast<int>(v);
    return *this;
  }
  bool has(Var v) const { return (provided >> static_cast<int>(v)) & 1u; }
  double get(Var v) const { return values[static_cast<int>(v)]; }

  static Bindings at(double x) { return Bindings{}.set(Var::x, x); }
  static Bindings at(double x, double y) {
    return Bindings{}.set(Var::x, x).set(Var::y, y);
  }
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error(what), position(pos) {}
  std::size_t position;  // byte offset into the source text
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An immutable, evaluable scalar expression.
//
// Grammar: literals, the variables above, binary + - * / ^, unary minus,
// abs, sqrt, sin, cos, exp, log (one argument), min, max (two arguments),
// parentheses. Precedence ^ > unary minus > * / > + -, with ^
// right-associative, so 2^3^2 = 512 and -x^2 = -(x^2).
//
// Evaluation is deterministic; any non-finite intermediate result
// (division by zero, log of a non-positive value, ...) raises EvalError
// naming the offending operation.
class FunctionSpec {
 public:
  FunctionSpec() = default;

  static FunctionSpec parse(std::string_view text);
  static FunctionSpec constant(double value);

  double evaluate(const Bindings& b) const;
  double operator()(const Bindings& b) const { return evaluate(b); }

  unsigned variable_mask() const { return varmask_; }
  bool uses(Var v) const { return (varmask_ >> static_cast<int>(v)) & 1u; }
  // 2 when the expression reads y, else 1.
  int spatial_arity() const { return uses(Var::y) ? 2 : 1; }

  const std::string& source() const { return source_; }

  // Canonical rendering; reparsing it yields a structurally identical tree.
  std::string to_string() const;

  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t {
    literal, variable,
    add, sub, mul, div, pow, neg,
    abs, sqrt, sin, cos, exp, log, min, max,
  };

  struct Node {
    Op op;
    double value = 0.0;  // literal
    Var var = Var::x;    // variable
    int lhs = -1;
    int rhs = -1;
  };

  double eval_node(int idx, const Bindings& b) const;
  void print_node(int idx, int parent_prec, bool right_side, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  unsigned varmask_ = 0;
  std::string source_;

  friend class ExprParser;
};

// Central finite difference of fn with respect to one variable.
double finite_difference(const FunctionSpec& fn, const Bindings& at, Var v,
                         double step);

}  // namespace towlab
