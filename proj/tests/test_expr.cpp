#include <cmath>

#include "doctest.h"
#include "finterm/expr.hpp"
#include "random_expr.hpp"

using namespace finterm;

namespace {

Expr P(const std::string& s, const ConstField& F = {}) { return parse(s, F); }

}  // namespace

TEST_CASE("parse shapes") {
  Expr e = P("exp(-z^2)");
  REQUIRE(e->kind == ExprKind::Exp);
  Expr m = e->args[0];
  REQUIRE(m->kind == ExprKind::Mul);
  CHECK(is_num(m->args[0], -1));
  CHECK(m->args[1]->kind == ExprKind::Pow);
  CHECK(m->args[1]->num == 2);
  CHECK(m->args[1]->args[0]->kind == ExprKind::Var);

  ConstField F;
  ParseOptions po;
  po.inverses.push_back(parse_inverse_decl("W=w*exp(w)", F));
  Expr w = parse("W(z)/z", F, po);
  REQUIRE(w->kind == ExprKind::Mul);
  CHECK(w->args[0]->kind == ExprKind::Inv);
  CHECK(w->args[0]->name == "W");
  CHECK(w->args[1]->kind == ExprKind::Pow);
  CHECK(w->args[1]->num == -1);

  CHECK(is_num(P("2*3 + 1/2"), Q(13, 2)));
  CHECK(is_num(P("0.25"), Q(1, 4)));
  CHECK(P("sqrt(z)")->num == Q(1, 2));
  CHECK(P("z^(2/3)")->num == Q(2, 3));
  CHECK(P("z^-2")->num == -2);
  CHECK(P("ln(z)")->kind == ExprKind::Log);
}

TEST_CASE("parse errors") {
  try {
    P("log(z");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseError::Syntax);
    CHECK(e.diag.position == 5);
    CHECK(e.diag.expected.count(")") == 1);
  }
  try {
    P("z + y");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseError::UnknownSymbol);
    CHECK(e.diag.position == 4);
    CHECK(!e.diag.expected.empty());
  }
  for (std::string bad : {"", "z +", "(z", "z)", "exp z", "z^z", "3 $"}) {
    try {
      P(bad);
      FAIL("expected error for " << bad);
    } catch (const ParseError& e) {
      CHECK(!e.diag.expected.empty());
      CHECK(e.diag.position <= bad.size());
    }
  }
  CHECK_THROWS_AS(P("sin(z)"), ParseError);
}

TEST_CASE("trigonometric sugar needs i") {
  ConstField F = parse_constants("i^2+1");
  Expr s = parse("sin(z)", F);
  NumEnv env;
  env.values["i"] = cplx(0, 1);
  env.values["z"] = 0.7;
  CHECK(std::abs(eval(s, env) - std::sin(0.7)) < 1e-12);
  CHECK(std::abs(eval(parse("cos(z)", F), env) - std::cos(0.7)) < 1e-12);
  CHECK(std::abs(eval(parse("tan(z)", F), env) - std::tan(0.7)) < 1e-12);
}

TEST_CASE("printing") {
  CHECK(print(P("exp(-z^2)")) == "exp(-z^2)");
  CHECK(print(P("1/(z+1)")) == "1/(z + 1)");
  CHECK(print(P("z - 3*z^2/2")) == "z - 3*z^2/2");
  CHECK(print(P("z^(1/2)")) == "sqrt(z)");
  CHECK(print(P("2/sqrt(z)")) == "2/sqrt(z)");
  CHECK(print(e_add(e_div(e_pow(e_var("W"), 2), e_num(2)), e_var("W"))) == "W^2/2 + W");
}

TEST_CASE("differentiation") {
  Expr d = differentiate(P("exp(-z^2)"));
  CHECK(print(d) == "-2*z*exp(-z^2)");
  CHECK(print(differentiate(P("log(z)+z"))) == "1/z + 1");
  ConstField F = parse_constants("c");
  CHECK(is_num(differentiate(parse("c", F)), 0));
  ParseOptions po;
  po.inverses.push_back(parse_inverse_decl("W=w*exp(w)", F));
  CHECK_THROWS_AS(differentiate(parse("W(z)", F, po)), InverseSymPresent);
}

TEST_CASE("print parse print is a fixed point") {
  ConstField F = parse_constants("c; a^2-2");
  testing::ExprGen g(2024, {"c", "a"});
  for (int i = 0; i < 200; ++i) {
    Expr e = g.gen(1 + i % 4);
    std::string s1 = print(e);
    Expr e1 = parse(s1, F);
    std::string s2 = print(e1);
    CHECK_MESSAGE(s1 == s2, s1 << " vs " << s2);
    CHECK_MESSAGE(expr_equal(parse(s2, F), e1), s2);
  }
}

TEST_CASE("differentiation is linear") {
  testing::ExprGen g(99);
  for (int i = 0; i < 100; ++i) {
    Expr e1 = g.gen(3), e2 = g.gen(3);
    Expr a = e_num(Q(g.pick(-5, 5), g.pick(1, 4)));
    Expr lhs = differentiate(e_add(e_mul(a, e1), e2));
    Expr rhs = e_add(e_mul(a, differentiate(e1)), differentiate(e2));
    CHECK_MESSAGE(expr_equal(lhs, rhs), print(lhs) << " vs " << print(rhs));
  }
}

TEST_CASE("derivative agrees with central differences") {
  testing::ExprGen g(5, {"c"});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  int checked = 0;
  for (int i = 0; checked < 100 && i < 1000; ++i) {
    Expr e = g.gen(3);
    Expr d = differentiate(e);
    NumEnv env;
    env.values["c"] = 0.37;
    cplx x(u(rng), u(rng) - 0.85);
    double h = 1e-5;
    env.values["z"] = x + h;
    cplx fp = eval(e, env);
    env.values["z"] = x - h;
    cplx fm = eval(e, env);
    env.values["z"] = x;
    cplx dv = eval(d, env);
    cplx fd = (fp - fm) / (2 * h);
    if (!std::isfinite(std::abs(dv)) || std::abs(dv) > 1e4 || std::abs(eval(e, env)) > 1e4) continue;
    ++checked;
    CHECK_MESSAGE(std::abs(fd - dv) <= 1e-6 * std::max(1.0, std::abs(dv)), print(e));
    auto dual = eval_dual(e, env, "z");
    CHECK(std::abs(dual.second - dv) <= 1e-9 * std::max(1.0, std::abs(dv)));
  }
  CHECK(checked == 100);
}

TEST_CASE("json form") {
  auto j = to_json(P("exp(z)/2"));
  CHECK(j["op"] == "mul");
  CHECK(j["args"][0]["value"] == "1/2");
  CHECK(j["args"][1]["op"] == "exp");
}
