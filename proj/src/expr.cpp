#include "towlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace towlab {

const char* var_name(Var v) {
  switch (v) {
    case Var::x: return "x";
    case Var::y: return "y";
    case Var::z: return "z";
    case Var::p1: return "p1";
    case Var::p2: return "p2";
    case Var::r: return "r";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

// Recursive-descent parser.
//
//   expression := term (('+'|'-') term)*
//   term       := factor (('*'|'/') factor)*
//   factor     := '-' factor | power
//   power      := atom ('^' factor)?          (right-associative)
//   atom       := number | var | fn '(' args ')' | '(' expression ')'
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  FunctionSpec run() {
    FunctionSpec out;
    out.source_ = std::string(text_);
    spec_ = &out;
    out.root_ = expression();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(pos_, "unexpected trailing input at position " +
                                 std::to_string(pos_));
    return out;
  }

 private:
  using Op = FunctionSpec::Op;

  int add_node(FunctionSpec::Node n) {
    spec_->nodes_.push_back(n);
    return static_cast<int>(spec_->nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int expression() {
    int lhs = term();
    for (;;) {
      if (eat('+')) {
        int rhs = term();
        lhs = add_node({Op::add, 0, Var::x, lhs, rhs});
      } else if (eat('-')) {
        int rhs = term();
        lhs = add_node({Op::sub, 0, Var::x, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = factor();
    for (;;) {
      if (eat('*')) {
        int rhs = factor();
        lhs = add_node({Op::mul, 0, Var::x, lhs, rhs});
      } else if (eat('/')) {
        int rhs = factor();
        lhs = add_node({Op::div, 0, Var::x, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int factor() {
    if (eat('-')) {
      int child = factor();
      return add_node({Op::neg, 0, Var::x, child, -1});
    }
    return power();
  }

  int power() {
    int base = atom();
    if (eat('^')) {
      int exponent = factor();  // allows a unary minus in the exponent
      return add_node({Op::pow, 0, Var::x, base, exponent});
    }
    return base;
  }

  int atom() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError(pos_, "unexpected end of expression");
    char c = text_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();

    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      std::string name(text_.substr(start, pos_ - start));

      if (peek() == '(') return call(name, start);

      Var v;
      if (name == "x") v = Var::x;
      else if (name == "y") v = Var::y;
      else if (name == "z") v = Var::z;
      else if (name == "p1") v = Var::p1;
      else if (name == "p2") v = Var::p2;
      else if (name == "r") v = Var::r;
      else
        throw ParseError(start, "unknown identifier '" + name + "' at position " +
                                    std::to_string(start));
      spec_->varmask_ |= 1u << static_cast<int>(v);
      return add_node({Op::variable, 0, v, -1, -1});
    }

    if (c == '(') {
      ++pos_;
      int inner = expression();
      if (!eat(')'))
        throw ParseError(pos_, "expected ')' at position " + std::to_string(pos_));
      return inner;
    }

    throw ParseError(pos_, std::string("unexpected character '") + c +
                               "' at position " + std::to_string(pos_));
  }

  int call(const std::string& name, std::size_t name_pos) {
    Op op;
    int arity;
    if (name == "abs") { op = Op::abs; arity = 1; }
    else if (name == "sqrt") { op = Op::sqrt; arity = 1; }
    else if (name == "sin") { op = Op::sin; arity = 1; }
    else if (name == "cos") { op = Op::cos; arity = 1; }
    else if (name == "exp") { op = Op::exp; arity = 1; }
    else if (name == "log") { op = Op::log; arity = 1; }
    else if (name == "min") { op = Op::min; arity = 2; }
    else if (name == "max") { op = Op::max; arity = 2; }
    else
      throw ParseError(name_pos, "unknown function '" + name + "' at position " +
                                     std::to_string(name_pos));
    if (!eat('(')) throw ParseError(pos_, "expected '('");
    int a = expression();
    int b = -1;
    if (arity == 2) {
      if (!eat(','))
        throw ParseError(pos_, name + " takes two arguments; expected ',' at position " +
                                   std::to_string(pos_));
      b = expression();
    }
    if (!eat(')'))
      throw ParseError(pos_, "expected ')' at position " + std::to_string(pos_));
    return add_node({op, 0, Var::x, a, b});
  }

  int number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{})
      throw ParseError(pos_, "malformed number at position " + std::to_string(pos_));
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return add_node({Op::literal, value, Var::x, -1, -1});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  FunctionSpec* spec_ = nullptr;
};

FunctionSpec FunctionSpec::parse(std::string_view text) {
  return ExprParser(text).run();
}

FunctionSpec FunctionSpec::constant(double value) {
  FunctionSpec out;
  out.nodes_.push_back({Op::literal, value, Var::x, -1, -1});
  out.root_ = 0;
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, value);
  out.source_.assign(buf, r.ptr);
  return out;
}

double FunctionSpec::eval_node(int idx, const Bindings& b) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::literal:
      return n.value;
    case Op::variable:
      if (!b.has(n.var))
        throw EvalError(std::string("missing binding for variable '") +
                        var_name(n.var) + "'");
      return b.get(n.var);
    case Op::add:
      return eval_node(n.lhs, b) + eval_node(n.rhs, b);
    case Op::sub:
      return eval_node(n.lhs, b) - eval_node(n.rhs, b);
    case Op::mul: {
      double v = eval_node(n.lhs, b) * eval_node(n.rhs, b);
      if (!std::isfinite(v)) throw EvalError("non-finite result of '*'");
      return v;
    }
    case Op::div: {
      double den = eval_node(n.rhs, b);
      if (den == 0.0) throw EvalError("division by zero");
      double v = eval_node(n.lhs, b) / den;
      if (!std::isfinite(v)) throw EvalError("non-finite result of '/'");
      return v;
    }
    case Op::pow: {
      double v = std::pow(eval_node(n.lhs, b), eval_node(n.rhs, b));
      if (!std::isfinite(v)) throw EvalError("non-finite result of '^'");
      return v;
    }
    case Op::neg:
      return -eval_node(n.lhs, b);
    case Op::abs:
      return std::fabs(eval_node(n.lhs, b));
    case Op::sqrt: {
      double a = eval_node(n.lhs, b);
      if (a < 0.0) throw EvalError("sqrt of negative argument");
      return std::sqrt(a);
    }
    case Op::sin:
      return std::sin(eval_node(n.lhs, b));
    case Op::cos:
      return std::cos(eval_node(n.lhs, b));
    case Op::exp: {
      double v = std::exp(eval_node(n.lhs, b));
      if (!std::isfinite(v)) throw EvalError("non-finite result of 'exp'");
      return v;
    }
    case Op::log: {
      double a = eval_node(n.lhs, b);
      if (a <= 0.0) throw EvalError("log of non-positive argument");
      return std::log(a);
    }
    case Op::min:
      return std::fmin(eval_node(n.lhs, b), eval_node(n.rhs, b));
    case Op::max:
      return std::fmax(eval_node(n.lhs, b), eval_node(n.rhs, b));
  }
  throw EvalError("corrupt expression node");
}

double FunctionSpec::evaluate(const Bindings& b) const {
  if (root_ < 0) throw EvalError("empty expression");
  return eval_node(root_, b);
}

// Precedence levels used for printing: + - are 1, * / 2, unary minus 3,
// ^ 4, atoms 5.
void FunctionSpec::print_node(int idx, int parent_prec, bool right_side,
                              std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  auto binary = [&](const char* sym, int prec, bool right_assoc) {
    // A child at equal precedence keeps its parentheses on the
    // associative side only.
    bool need = prec < parent_prec ||
                (prec == parent_prec && right_side != right_assoc);
    if (need) out += '(';
    print_node(n.lhs, prec, false, out);
    out += sym;
    print_node(n.rhs, prec, true, out);
    if (need) out += ')';
  };
  auto fn1 = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n.lhs, 0, false, out);
    out += ')';
  };
  switch (n.op) {
    case Op::literal: {
      char buf[64];
      auto r = std::to_chars(buf, buf + sizeof buf, n.value);
      out.append(buf, r.ptr);
      return;
    }
    case Op::variable:
      out += var_name(n.var);
      return;
    case Op::add: binary(" + ", 1, false); return;
    case Op::sub: binary(" - ", 1, false); return;
    case Op::mul: binary("*", 2, false); return;
    case Op::div: binary("/", 2, false); return;
    case Op::pow: binary("^", 4, true); return;
    case Op::neg: {
      bool need = 3 < parent_prec || parent_prec == 3;
      if (need) out += '(';
      out += '-';
      print_node(n.lhs, 3, true, out);
      if (need) out += ')';
      return;
    }
    case Op::abs: fn1("abs"); return;
    case Op::sqrt: fn1("sqrt"); return;
    case Op::sin: fn1("sin"); return;
    case Op::cos: fn1("cos"); return;
    case Op::exp: fn1("exp"); return;
    case Op::log: fn1("log"); return;
    case Op::min:
    case Op::max:
      out += (n.op == Op::min) ? "min(" : "max(";
      print_node(n.lhs, 0, false, out);
      out += ", ";
      print_node(n.rhs, 0, false, out);
      out += ')';
      return;
  }
}

std::string FunctionSpec::to_string() const {
  if (root_ < 0) return "";
  std::string out;
  print_node(root_, 0, false, out);
  return out;
}

double finite_difference(const FunctionSpec& fn, const Bindings& at, Var v,
                         double step) {
  Bindings plus = at, minus = at;
  plus.set(v, at.get(v) + step);
  minus.set(v, at.get(v) - step);
  return (fn.evaluate(plus) - fn.evaluate(minus)) / (2.0 * step);
}

}  // namespace towlab
