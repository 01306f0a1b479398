#include "expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "error.hpp"

namespace modsum {

namespace {

struct FunctionInfo {
  std::string_view name;
  Expr::Op op;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Expr::Op::Sin, 1},   {"cos", Expr::Op::Cos, 1},   {"exp", Expr::Op::Exp, 1},
    {"log", Expr::Op::Log, 1},   {"sqrt", Expr::Op::Sqrt, 1}, {"abs", Expr::Op::Abs, 1},
    {"min", Expr::Op::Min, 2},   {"max", Expr::Op::Max, 2},
};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

const FunctionInfo* find_function(Expr::Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return &f;
  return nullptr;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

[[noreturn]] void syntax_error(std::size_t offset, const std::string& msg) {
  throw Error(ErrorCode::SyntaxError, "syntax error at offset " + std::to_string(offset) + ": " + msg, offset);
}

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr run() {
    skip_ws();
    if (pos_ >= text_.size()) syntax_error(pos_, "empty expression; expected number, 'x', function call or '('");
    const int root = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      syntax_error(pos_, std::string("unexpected '") + text_[pos_] + "'; expected operator or end of input");
    out_.root_ = root;
    return std::move(out_);
  }

 private:
  int emit(Expr::Op op, double v = 0.0, int lhs = -1, int rhs = -1) {
    out_.nodes_.push_back({op, v, lhs, rhs});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) syntax_error(pos_, std::string("unexpected end of input; expected '") + c + "'");
      syntax_error(pos_, std::string("unexpected '") + text_[pos_] + "'; expected '" + c + "'");
    }
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = emit(Expr::Op::Add, 0.0, lhs, parse_term());
      else if (accept('-')) lhs = emit(Expr::Op::Sub, 0.0, lhs, parse_term());
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = emit(Expr::Op::Mul, 0.0, lhs, parse_unary());
      else if (accept('/')) lhs = emit(Expr::Op::Div, 0.0, lhs, parse_unary());
      else return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) return emit(Expr::Op::Neg, 0.0, parse_unary());
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    if (accept('^')) return emit(Expr::Op::Pow, 0.0, base, parse_unary());
    return base;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      syntax_error(pos_, "unexpected end of input; expected number, 'x', function call or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    syntax_error(pos_, std::string("unexpected '") + c + "'; expected number, 'x', function call or '('");
  }

  int parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && is_digit(text_[end])) ++end;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      while (end < text_.size() && is_digit(text_[end])) ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && is_digit(text_[e])) {
        while (e < text_.size() && is_digit(text_[e])) ++e;
        end = e;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + end || !std::isfinite(v))
      syntax_error(start, "malformed number '" + std::string(text_.substr(start, end - start)) + "'");
    pos_ = end;
    return emit(Expr::Op::Const, v);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x" || name == "t") return emit(Expr::Op::Var);
    if (name == "pi") return emit(Expr::Op::Const, std::numbers::pi);

    const FunctionInfo* fn = find_function(name);
    if (fn == nullptr)
      throw Error(ErrorCode::UnknownIdentifier,
                  "unknown identifier '" + std::string(name) + "' at offset " + std::to_string(start), start);
    expect('(');
    const int a = parse_expr();
    int b = -1;
    if (fn->arity == 2) {
      expect(',');
      b = parse_expr();
    } else if (accept(',')) {
      syntax_error(pos_ - 1, std::string(name) + " takes one argument");
    }
    expect(')');
    return emit(fn->op, 0.0, a, b);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Expr out_;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text).run(); }

Expr Expr::constant(double v) {
  require(std::isfinite(v), "expression constants must be finite");
  Expr e;
  e.nodes_.push_back({Op::Const, v, -1, -1});
  e.root_ = 0;
  return e;
}

Expr Expr::variable() {
  Expr e;
  e.nodes_.push_back({Op::Var, 0.0, -1, -1});
  e.root_ = 0;
  return e;
}

int Expr::append(const Expr& sub) {
  const int offset = static_cast<int>(nodes_.size());
  for (Node n : sub.nodes_) {
    if (n.lhs >= 0) n.lhs += offset;
    if (n.rhs >= 0) n.rhs += offset;
    nodes_.push_back(n);
  }
  return sub.root_ + offset;
}

Expr Expr::unary(Op op, const Expr& a) {
  const FunctionInfo* fn = find_function(op);
  require(op == Op::Neg || (fn != nullptr && fn->arity == 1), "Expr::unary: not a unary operation");
  Expr e;
  const int ia = e.append(a);
  e.nodes_.push_back({op, 0.0, ia, -1});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

Expr Expr::binary(Op op, const Expr& a, const Expr& b) {
  const bool arith = op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow;
  require(arith || op == Op::Min || op == Op::Max, "Expr::binary: not a binary operation");
  Expr e;
  const int ia = e.append(a);
  const int ib = e.append(b);
  e.nodes_.push_back({op, 0.0, ia, ib});
  e.root_ = static_cast<int>(e.nodes_.size()) - 1;
  return e;
}

namespace {

[[noreturn]] void domain_error(const char* what, double arg) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "domain error: %s (argument %.17g)", what, arg);
  throw Error(ErrorCode::DomainError, buf);
}

double checked(double v, const char* what, double arg) {
  if (!std::isfinite(v)) domain_error(what, arg);
  return v;
}

}  // namespace

double Expr::eval_node(int i, double x) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Neg: return -eval_node(n.lhs, x);
    case Op::Add: return checked(eval_node(n.lhs, x) + eval_node(n.rhs, x), "non-finite sum", x);
    case Op::Sub: return checked(eval_node(n.lhs, x) - eval_node(n.rhs, x), "non-finite difference", x);
    case Op::Mul: return checked(eval_node(n.lhs, x) * eval_node(n.rhs, x), "non-finite product", x);
    case Op::Div: {
      const double num = eval_node(n.lhs, x);
      const double den = eval_node(n.rhs, x);
      return checked(num / den, "division yields a non-finite value", x);
    }
    case Op::Pow: return checked(std::pow(eval_node(n.lhs, x), eval_node(n.rhs, x)), "non-finite power", x);
    case Op::Sin: return std::sin(eval_node(n.lhs, x));
    case Op::Cos: return std::cos(eval_node(n.lhs, x));
    case Op::Exp: return checked(std::exp(eval_node(n.lhs, x)), "exp overflow", x);
    case Op::Log: {
      const double a = eval_node(n.lhs, x);
      if (!(a > 0.0)) domain_error("log of non-positive value", a);
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval_node(n.lhs, x);
      if (a < 0.0) domain_error("sqrt of negative value", a);
      return std::sqrt(a);
    }
    case Op::Abs: return std::fabs(eval_node(n.lhs, x));
    case Op::Min: return std::fmin(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case Op::Max: return std::fmax(eval_node(n.lhs, x), eval_node(n.rhs, x));
  }
  return 0.0;
}

double Expr::eval(double x) const { return eval_node(root_, x); }

void Expr::print_node(int i, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::Var: out += 'x'; return;
    case Op::Neg:
      out += "(-";
      print_node(n.lhs, out);
      out += ')';
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      static constexpr char kSym[] = {'+', '-', '*', '/', '^'};
      out += '(';
      print_node(n.lhs, out);
      out += ' ';
      out += kSym[static_cast<int>(n.op) - static_cast<int>(Op::Add)];
      out += ' ';
      print_node(n.rhs, out);
      out += ')';
      return;
    }
    default: {
      const FunctionInfo* fn = find_function(n.op);
      out += fn->name;
      out += '(';
      print_node(n.lhs, out);
      if (fn->arity == 2) {
        out += ", ";
        print_node(n.rhs, out);
      }
      out += ')';
      return;
    }
  }
}

std::string Expr::str() const {
  std::string out;
  print_node(root_, out);
  return out;
}

bool Expr::equal_nodes(const Expr& a, int i, const Expr& b, int j) {
  const Node& x = a.nodes_[static_cast<std::size_t>(i)];
  const Node& y = b.nodes_[static_cast<std::size_t>(j)];
  if (x.op != y.op) return false;
  if (x.op == Op::Const) return x.value == y.value;
  if ((x.lhs < 0) != (y.lhs < 0) || (x.rhs < 0) != (y.rhs < 0)) return false;
  if (x.lhs >= 0 && !equal_nodes(a, x.lhs, b, y.lhs)) return false;
  if (x.rhs >= 0 && !equal_nodes(a, x.rhs, b, y.rhs)) return false;
  return true;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.root_ < 0 || b.root_ < 0) return a.root_ == b.root_;
  return Expr::equal_nodes(a, a.root_, b, b.root_);
}

}  // namespace modsum
