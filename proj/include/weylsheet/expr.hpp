#pragma once

// Expression trees over a small fixed set of named variables.
//
// Trees are immutable and share structure. The same tree type backs surface
// embeddings (variables u1, u2), energy densities (H, K) and ambient vector
// fields (x, y, z); the variable names only matter to the parser and printer.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weylsheet/errors.hpp"
#include "weylsheet/taylor.hpp"

namespace weylsheet {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Sin,
  Cos,
  Sinh,
  Cosh,
  Exp,
  Log,
  Sqrt,
  Atan,
};

inline constexpr std::string_view kSurfaceVars[] = {"u1", "u2"};
inline constexpr std::string_view kDensityVars[] = {"H", "K"};
inline constexpr std::string_view kSpaceVars[] = {"x", "y", "z"};

class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr unary(Op op, Expr arg);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  Op op() const { return node_->op; }
  double constant_value() const { return node_->value; }
  int variable_index() const { return node_->var; }
  std::size_t arity() const { return node_->children.size(); }
  const Expr& child(std::size_t k) const { return node_->children[k]; }

  std::size_t node_count() const;
  /// True when variable `index` appears anywhere in the tree.
  bool references(int index) const;
  /// Largest variable index used, or -1 for a closed tree.
  int max_variable() const;

  /// Evaluates with `T` = double or Taylor2<N>. Throws DomainError on
  /// division by zero, log/sqrt outside their domain or non-finite results.
  template <class T>
  T eval(std::span<const T> vars) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int var = -1;
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(const Expr& a, double b);
Expr operator*(double a, const Expr& b);
Expr operator/(const Expr& a, double b);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr atan(const Expr& a);

/// Parses one expression. Identifiers other than `variables`, the function
/// names and `pi` are rejected. `offset` is added to reported error positions.
Expr parse_expr(std::string_view text, std::span<const std::string_view> variables,
                std::size_t offset = 0);

/// Canonical printer: minimal parentheses, shortest round-trip constants.
/// parse_expr(to_string(e)) reproduces e exactly.
std::string to_string(const Expr& e, std::span<const std::string_view> variables);

// ---------------------------------------------------------------------------

namespace expr_detail {

inline double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite intermediate in ") + what);
  return v;
}

template <class T>
T checked(T v, const char* what) {
  if (!all_finite(v)) throw DomainError(std::string("non-finite intermediate in ") + what);
  return v;
}

template <class T>
T apply_pow(const T& base, const T& exponent) {
  using std::pow;
  const double b = value_of(base);
  const double e = value_of(exponent);
  if (b < 0.0 && std::round(e) != e)
    throw DomainError("negative base raised to a non-integer power");
  if (b == 0.0 && e < 0.0) throw DomainError("zero raised to a negative power");
  return pow(base, exponent);
}

}  // namespace expr_detail

template <class T>
T Expr::eval(std::span<const T> vars) const {
  using std::atan;
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return T(n.value);
    case Op::Var:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= vars.size())
        throw DomainError("expression variable index out of range");
      return vars[n.var];
    case Op::Add:
      return expr_detail::checked<T>(n.children[0].eval(vars) + n.children[1].eval(vars), "+");
    case Op::Sub:
      return expr_detail::checked<T>(n.children[0].eval(vars) - n.children[1].eval(vars), "-");
    case Op::Mul:
      return expr_detail::checked<T>(n.children[0].eval(vars) * n.children[1].eval(vars), "*");
    case Op::Div: {
      const T d = n.children[1].eval(vars);
      if (value_of(d) == 0.0) throw DomainError("division by zero");
      return expr_detail::checked<T>(n.children[0].eval(vars) / d, "/");
    }
    case Op::Pow:
      return expr_detail::checked<T>(
          expr_detail::apply_pow<T>(n.children[0].eval(vars), n.children[1].eval(vars)), "^");
    case Op::Neg:
      return -n.children[0].eval(vars);
    case Op::Sin:
      return sin(n.children[0].eval(vars));
    case Op::Cos:
      return cos(n.children[0].eval(vars));
    case Op::Sinh:
      return expr_detail::checked<T>(sinh(n.children[0].eval(vars)), "sinh");
    case Op::Cosh:
      return expr_detail::checked<T>(cosh(n.children[0].eval(vars)), "cosh");
    case Op::Exp:
      return expr_detail::checked<T>(exp(n.children[0].eval(vars)), "exp");
    case Op::Log: {
      const T a = n.children[0].eval(vars);
      if (value_of(a) <= 0.0) throw DomainError("log of nonpositive argument");
      return expr_detail::checked<T>(log(a), "log");
    }
    case Op::Sqrt: {
      const T a = n.children[0].eval(vars);
      if (value_of(a) < 0.0) throw DomainError("sqrt of negative argument");
      return expr_detail::checked<T>(sqrt(a), "sqrt");
    }
    case Op::Atan:
      return atan(n.children[0].eval(vars));
  }
  throw DomainError("corrupt expression node");
}

}  // namespace weylsheet
