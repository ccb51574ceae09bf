#include "weylsheet/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <numbers>

namespace weylsheet {

Expr::Expr() : Expr(std::make_shared<const Node>()) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
  // Negated literals are stored as negative constants so that printing and
  // re-parsing yields the same tree.
  if (op == Op::Neg && arg.op() == Op::Const) return constant(-arg.constant_value());
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children = {std::move(arg)};
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->children = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

std::size_t Expr::node_count() const {
  std::size_t count = 1;
  for (const Expr& c : node_->children) count += c.node_count();
  return count;
}

bool Expr::references(int index) const {
  if (node_->op == Op::Var) return node_->var == index;
  for (const Expr& c : node_->children)
    if (c.references(index)) return true;
  return false;
}

int Expr::max_variable() const {
  int m = node_->op == Op::Var ? node_->var : -1;
  for (const Expr& c : node_->children) m = std::max(m, c.max_variable());
  return m;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.arity() != b.arity()) return false;
  if (a.op() == Op::Const) return a.constant_value() == b.constant_value();
  if (a.op() == Op::Var) return a.variable_index() == b.variable_index();
  for (std::size_t k = 0; k < a.arity(); ++k)
    if (!(a.child(k) == b.child(k))) return false;
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Op::Pow, base, exponent); }
Expr pow(const Expr& base, double exponent) { return pow(base, Expr::constant(exponent)); }
Expr sin(const Expr& a) { return Expr::unary(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Op::Cos, a); }
Expr sinh(const Expr& a) { return Expr::unary(Op::Sinh, a); }
Expr cosh(const Expr& a) { return Expr::unary(Op::Cosh, a); }
Expr exp(const Expr& a) { return Expr::unary(Op::Exp, a); }
Expr log(const Expr& a) { return Expr::unary(Op::Log, a); }
Expr sqrt(const Expr& a) { return Expr::unary(Op::Sqrt, a); }
Expr atan(const Expr& a) { return Expr::unary(Op::Atan, a); }

namespace {

struct FunctionName {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<FunctionName, 9> kFunctions{{
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"sinh", Op::Sinh, 1},
    {"cosh", Op::Cosh, 1},
    {"exp", Op::Exp, 1},
    {"log", Op::Log, 1},
    {"sqrt", Op::Sqrt, 1},
    {"atan", Op::Atan, 1},
    {"pow", Op::Pow, 2},
}};

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string_view> vars, std::size_t offset)
      : text_(text), vars_(vars), offset_(offset) {}

  Expr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Expr e = expression();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, offset_ + pos_); }

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + term();
      else if (accept('-'))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = lhs * unary();
      else if (accept('/'))
        lhs = lhs / unary();
      else
        return lhs;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expression();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t k) {
      return k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]));
    };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (is_digit(k)) {
        pos_ = k;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (std::size_t k = 0; k < vars_.size(); ++k)
      if (vars_[k] == name) return Expr::variable(static_cast<int>(k));
    if (name == "pi") return Expr::constant(std::numbers::pi);

    for (const FunctionName& f : kFunctions) {
      if (f.name != name) continue;
      if (!accept('(')) fail("expected '(' after function '" + std::string(name) + "'");
      std::vector<Expr> args;
      if (!accept(')')) {
        args.push_back(expression());
        while (accept(',')) args.push_back(expression());
        if (!accept(')')) fail("expected ')' closing call to '" + std::string(name) + "'");
      }
      if (static_cast<int>(args.size()) != f.arity) {
        throw ParseError("function '" + std::string(name) + "' expects " + std::to_string(f.arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         offset_ + start);
      }
      if (f.arity == 2) return Expr::binary(f.op, args[0], args[1]);
      return Expr::unary(f.op, args[0]);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", offset_ + start);
  }

  std::string_view text_;
  std::span<const std::string_view> vars_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    case Op::Const:
      return std::signbit(e.constant_value()) ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_constant(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void print(const Expr& e, std::span<const std::string_view> vars, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::span<const std::string_view> vars,
                   std::string& out) {
  if (wrap) out += '(';
  print(e, vars, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::span<const std::string_view> vars, std::string& out) {
  switch (e.op()) {
    case Op::Const:
      out += format_constant(e.constant_value());
      return;
    case Op::Var: {
      const int k = e.variable_index();
      if (k >= 0 && static_cast<std::size_t>(k) < vars.size())
        out += vars[k];
      else
        out += "v" + std::to_string(k);
      return;
    }
    case Op::Add:
    case Op::Sub: {
      print_wrapped(e.child(0), precedence(e.child(0)) < 1, vars, out);
      out += e.op() == Op::Add ? " + " : " - ";
      print_wrapped(e.child(1), precedence(e.child(1)) <= 1, vars, out);
      return;
    }
    case Op::Mul:
    case Op::Div: {
      print_wrapped(e.child(0), precedence(e.child(0)) < 2, vars, out);
      out += e.op() == Op::Mul ? " * " : " / ";
      print_wrapped(e.child(1), precedence(e.child(1)) <= 2, vars, out);
      return;
    }
    case Op::Pow:
      print_wrapped(e.child(0), precedence(e.child(0)) <= 4, vars, out);
      out += '^';
      print_wrapped(e.child(1), precedence(e.child(1)) < 3, vars, out);
      return;
    case Op::Neg:
      out += '-';
      print_wrapped(e.child(0), precedence(e.child(0)) < 3, vars, out);
      return;
    default:
      break;
  }
  for (const FunctionName& f : kFunctions) {
    if (f.op == e.op() && f.arity == 1) {
      out += f.name;
      out += '(';
      print(e.child(0), vars, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string_view> variables,
                std::size_t offset) {
  return Parser(text, variables, offset).parse();
}

std::string to_string(const Expr& e, std::span<const std::string_view> variables) {
  std::string out;
  print(e, variables, out);
  return out;
}

}  // namespace weylsheet
