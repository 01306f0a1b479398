#pragma once

// Expression language for the user-supplied functions f, psi, lambda, phi
// and Lambda. One free variable, spelled `x` or `t`.
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?          right associative
//   atom  := number | 'x' | 't' | 'pi' | ident '(' expr (',' expr)? ')' | '(' expr ')'
//
// so `-x^2` is -(x^2) and `2^-1` is 0.5. Implicit multiplication is rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace modsum {

class Expr {
 public:
  enum class Op : std::uint8_t {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max
  };

  static Expr parse(std::string_view text);

  static Expr constant(double v);
  static Expr variable();
  static Expr unary(Op op, const Expr& a);
  static Expr binary(Op op, const Expr& a, const Expr& b);

  // Throws Error(DomainError) on log of non-positive, sqrt of negative, or
  // any non-finite intermediate.
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  // Fully parenthesized canonical text. parse(str()) == *this for every tree
  // whose constants are finite and non-negative (the parser never produces
  // negative literals; `-2` is Neg(2)).
  std::string str() const;

  std::size_t node_count() const noexcept { return nodes_.size(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  Expr() = default;
  int append(const Expr& sub);
  double eval_node(int i, double x) const;
  void print_node(int i, std::string& out) const;
  static bool equal_nodes(const Expr& a, int i, const Expr& b, int j);

  friend class ExprParser;

  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace modsum
