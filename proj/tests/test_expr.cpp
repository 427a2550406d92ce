#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pcc/expr.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using pcc::Expr;

namespace {

const std::vector<std::string> kXY{"x", "y"};

double at(const std::string& text, pcc::Point p) { return oracle::value(pcc::parse_expr(text, kXY), p); }

std::size_t parse_error_offset(const std::string& text) {
  try {
    pcc::parse_expr(text, kXY);
  } catch (const pcc::ParseError& e) {
    return e.offset();
  }
  FAIL("no parse error for " << text);
  return 0;
}

}  // namespace

TEST_CASE("atoms: names, coordinates, integers, decimals and rationals") {
  CHECK(at("x", {2, 3}) == 2);
  CHECK(at("y", {2, 3}) == 3);
  CHECK(at("(coord 1)", {2, 3}) == 3);
  CHECK(at("-4", {0, 0}) == -4);
  CHECK(at("0.25", {0, 0}) == 0.25);
  CHECK(at("-1.5", {0, 0}) == -1.5);
  CHECK(at("6/4", {0, 0}) == 1.5);

  const Expr r = pcc::parse_expr("6/4");
  CHECK(r.kind() == Expr::Kind::Const);
  CHECK(r.num() == 3);
  CHECK(r.den() == 2);
  const Expr d = pcc::parse_expr("-0.125");
  CHECK(d.num() == -1);
  CHECK(d.den() == 8);
}

TEST_CASE("operators") {
  CHECK(at("(+ x y 1)", {2, 3}) == 6);
  CHECK(at("(* x y)", {2, 3}) == 6);
  CHECK(at("(- x)", {2, 3}) == -2);
  CHECK(at("(- x y 1)", {2, 3}) == -2);
  CHECK(at("(/ x y)", {3, 2}) == 1.5);
  CHECK(at("(pow x 3)", {2, 0}) == 8);
  CHECK(at("(pow x 0)", {0, 0}) == 1);
  CHECK(at("(sin x)", {0.5, 0}) == std::sin(0.5));
  CHECK(at("(cos y)", {0, 0.5}) == std::cos(0.5));
  CHECK(at("(exp (* x y))", {1, 2}) == std::exp(2.0));
}

TEST_CASE("printing and reparsing reproduces the same tree") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const Expr e = oracle::random_expr(rng, 3, 4);
    const std::string s = pcc::to_string(e);
    const Expr back = pcc::parse_expr(s);
    CHECK(pcc::to_string(back) == s);
    const pcc::Point p = oracle::random_point(rng, 3);
    CHECK(oracle::value(back, p) == oracle::value(e, p));
  }
}

TEST_CASE("expression lists") {
  const auto es = pcc::parse_expr_list("x (* x y)\n  1/2", kXY);
  REQUIRE(es.size() == 3);
  CHECK(pcc::to_string(es[1]) == "(* (coord 0) (coord 1))");
  CHECK(pcc::to_string(es[2]) == "1/2");
}

TEST_CASE("parse errors carry offsets") {
  CHECK(parse_error_offset("z") == 0);
  CHECK(parse_error_offset("(+ x q)") == 5);
  CHECK(parse_error_offset("(foo x)") == 0);
  CHECK(parse_error_offset("(+ x") == 0);
  CHECK(parse_error_offset(")") == 0);
  CHECK(parse_error_offset("x y") == 3);
  CHECK(parse_error_offset("(pow x -1)") == 6);
  CHECK(parse_error_offset("(pow x 1.5)") == 6);
  CHECK(parse_error_offset("(coord 9)") == 6);
  CHECK(parse_error_offset("(/ x)") == 0);
  CHECK(parse_error_offset("(sin x y)") == 0);
  CHECK(parse_error_offset("()") == 0);
  CHECK(parse_error_offset("1/0") == 0);
  CHECK(parse_error_offset("") == 0);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(at("(/ 1 (- x 1))", {1, 0}), pcc::EvalError);
  CHECK_THROWS_AS(oracle::value(Expr::power(Expr::coord(0), -2), {1.0}), pcc::EvalError);
  CHECK_THROWS_AS(oracle::value(Expr::coord(2), {1.0, 2.0}), pcc::EvalError);
}

TEST_CASE("max coordinate index") {
  CHECK(pcc::parse_expr("5").max_coord() < 0);
  CHECK(pcc::parse_expr("(+ (coord 0) (sin (coord 4)))").max_coord() == 4);
}
