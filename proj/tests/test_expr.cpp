#include <cmath>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "expr.hpp"

using namespace modsum;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    Expr::parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error for '" << text << "'");
  return ErrorCode::InvalidArgument;
}

std::size_t offset_of(const std::string& text) {
  try {
    Expr::parse(text);
  } catch (const Error& e) {
    REQUIRE(e.offset().has_value());
    return *e.offset();
  }
  FAIL("expected a parse error for '" << text << "'");
  return 0;
}

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 12);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  switch (pick(rng)) {
    case 0: return Expr::constant(val(rng));
    case 1: return Expr::variable();
    case 2: return Expr::unary(Expr::Op::Neg, random_expr(rng, depth - 1));
    case 3: return Expr::binary(Expr::Op::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(Expr::Op::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: return Expr::binary(Expr::Op::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 6: return Expr::binary(Expr::Op::Div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 7: return Expr::binary(Expr::Op::Pow, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 8: return Expr::unary(Expr::Op::Sin, random_expr(rng, depth - 1));
    case 9: return Expr::unary(Expr::Op::Sqrt, random_expr(rng, depth - 1));
    case 10: return Expr::unary(Expr::Op::Abs, random_expr(rng, depth - 1));
    case 11: return Expr::binary(Expr::Op::Min, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: return Expr::binary(Expr::Op::Max, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse examples") {
  CHECK(Expr::parse("2*x+1").eval(3.0) == 7.0);
  CHECK(std::fabs(Expr::parse("sin(x)^2+cos(x)^2").eval(0.7) - 1.0) <= 1e-12);
  CHECK(code_of("x*") == ErrorCode::SyntaxError);
  CHECK(offset_of("x*") == 2);
}

TEST_CASE("eval examples") {
  CHECK(Expr::parse("x^2").eval(0.5) == 0.25);
  CHECK_THROWS_AS(Expr::parse("1/x").eval(0.0), Error);
  CHECK(Expr::parse("exp(0)").eval(123.0) == 1.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(Expr::parse("-x^2").eval(3.0) == -9.0);
  CHECK(Expr::parse("2^3^2").eval(0.0) == 512.0);
  CHECK(Expr::parse("2^-1").eval(0.0) == 0.5);
  CHECK(Expr::parse("8/4/2").eval(0.0) == 1.0);
  CHECK(Expr::parse("8-4-2").eval(0.0) == 2.0);
  CHECK(Expr::parse("2+3*4").eval(0.0) == 14.0);
  CHECK(Expr::parse("(2+3)*4").eval(0.0) == 20.0);
  CHECK(Expr::parse("--x").eval(2.0) == 2.0);
  CHECK(Expr::parse("t*2").eval(1.5) == 3.0);
  CHECK(Expr::parse("min(x, 1) + max(x, 1)").eval(3.0) == 4.0);
  CHECK(Expr::parse("1.5e2 + .5").eval(0.0) == 150.5);
  CHECK(std::fabs(Expr::parse("sin(2*pi*x)").eval(0.25) - 1.0) < 1e-15);
}

TEST_CASE("syntax and identifier errors carry offsets") {
  CHECK(code_of("2x") == ErrorCode::SyntaxError);
  CHECK(offset_of("2x") == 1);
  CHECK(code_of("") == ErrorCode::SyntaxError);
  CHECK(code_of("(x+1") == ErrorCode::SyntaxError);
  CHECK(offset_of("(x+1") == 4);
  CHECK(code_of("sin(x, 2)") == ErrorCode::SyntaxError);
  CHECK(code_of("max(x)") == ErrorCode::SyntaxError);
  CHECK(code_of("x $ 2") == ErrorCode::SyntaxError);
  CHECK(offset_of("x $ 2") == 2);
  CHECK(code_of("y + 1") == ErrorCode::UnknownIdentifier);
  CHECK(offset_of("1 + foo(x)") == 4);
  CHECK(code_of("1 + foo(x)") == ErrorCode::UnknownIdentifier);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(Expr::parse("log(x)").eval(0.0), Error);
  CHECK_THROWS_AS(Expr::parse("log(x)").eval(-1.0), Error);
  CHECK_THROWS_AS(Expr::parse("sqrt(x)").eval(-1e-300), Error);
  CHECK_THROWS_AS(Expr::parse("exp(x)").eval(1000.0), Error);
  CHECK_THROWS_AS(Expr::parse("x^0.5").eval(-1.0), Error);
  CHECK(Expr::parse("sqrt(x)").eval(0.0) == 0.0);
  try {
    Expr::parse("1/x").eval(0.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("print/parse round trip over generated trees") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const Expr e = random_expr(rng, 5);
    const Expr back = Expr::parse(e.str());
    REQUIRE_MESSAGE(back == e, e.str());
    CHECK(back.str() == e.str());
  }
}

TEST_CASE("eval is deterministic") {
  const Expr e = Expr::parse("sin(3*x) * exp(-x^2) + sqrt(abs(x))");
  for (double x : {-2.0, -0.1, 0.0, 0.3, 1.7}) CHECK(e.eval(x) == e.eval(x));
}
