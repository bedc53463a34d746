#include <random>

#include "doctest.h"
#include "finterm/tower.hpp"
#include "random_expr.hpp"

using namespace finterm;

namespace {

std::pair<DiffTower, Elem> B(const std::string& s, const ConstField& F = {}) { return tower_build(parse(s, F), F); }

int count_kind(const DiffTower& T, GenKind k) {
  int n = 0;
  for (auto& m : T.monomials) n += m.level->gen == k;
  return n;
}

// value of the tower element and the parsed expression at a point
void numeric_agree(const std::string& s, const ConstField& F = {}) {
  auto [T, e] = B(s, F);
  Expr x = parse(s, F);
  for (cplx z : {cplx(0.7, 0.1), cplx(1.3, -0.2), cplx(2.1, 0.3)}) {
    NumEnv env = tower_numeric_env(T, z);
    cplx a = eval(x, env), b = eval(T.to_expr(e), env);
    CHECK_MESSAGE(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)), s << " -> " << print(T.to_expr(e)));
  }
}

}  // namespace

TEST_CASE("exp relations share monomials") {
  auto [T, e] = B("exp(z) + exp(2*z)");
  REQUIRE(T.monomials.size() == 1);
  CHECK(T.monomials[0].level->gen == GenKind::Exp);
  const Level& L = T.top();
  Elem th = gen(L);
  CHECK(eq(L, e, add(L, th, mul(L, th, th))));

  auto [T2, e2] = B("exp(z) + exp(2*z) + exp(z+1)");
  CHECK(T2.monomials.size() == 1);
  CHECK(T2.fresh.size() == 1);
  numeric_agree("exp(z) + exp(2*z) + exp(z+1)");

  auto [T3, e3] = B("exp(z) + exp(z/2)");
  CHECK(T3.monomials.size() == 1);
  numeric_agree("exp(z) + exp(z/2)");
  numeric_agree("exp(z/3) + exp(z/2) + exp(5*z/6 + 2)");
}

TEST_CASE("log relations introduce one branch constant") {
  auto [T, e] = B("log(z^2)");
  REQUIRE(T.monomials.size() == 1);
  CHECK(T.monomials[0].level->gen == GenKind::Log);
  CHECK(T.fresh.size() == 1);
  const Level& L = T.top();
  Elem c = lift(L, *T.field.find(T.fresh[0].name), gen(*T.field.find(T.fresh[0].name)));
  CHECK(eq(L, e, add(L, scale(L, gen(L), Q(2)), c)));
  numeric_agree("log(z^2)");

  auto [T2, e2] = B("log(z)");
  CHECK(T2.fresh.empty());
  CHECK(eq(T2.top(), e2, gen(T2.top())));

  auto [T3, e3] = B("log(z) + log(z^2+z) + log(2*z+2)");
  CHECK(count_kind(T3, GenKind::Log) == 2);
  numeric_agree("log(z) + log(z^2+z) + log(2*z+2)");

  auto [T4, e4] = B("log(exp(z)) + exp(z)");
  CHECK(T4.monomials.size() == 1);
  numeric_agree("log(exp(z)) + exp(z)");

  auto [T5, e5] = B("exp(2*log(z) + 1)");
  CHECK(T5.monomials.size() == 1);
  numeric_agree("exp(2*log(z) + 1)");
}

TEST_CASE("square roots") {
  auto [T, e] = B("exp(log(z)/2)");
  REQUIRE(T.monomials.size() == 2);
  const Level& R = *T.monomials[1].level;
  CHECK(R.gen == GenKind::Root);
  CHECK(R.kind == LevelKind::Alg);
  Elem low;
  CHECK(eq(*R.base, R.arg, lift(*R.base, *T.zlevel, gen(*T.zlevel))));
  numeric_agree("exp(log(z)/2)");

  auto [T2, e2] = B("sqrt(z^2)");
  CHECK(T2.monomials.empty());

  auto [T3, e3] = B("sqrt(exp(z)) + exp(z)");
  CHECK(T3.monomials.size() == 1);
  numeric_agree("sqrt(exp(z)) + exp(z)");

  auto [T4, e4] = B("sqrt(-4*z^3)");
  CHECK(T4.field.symbols().size() == 1);
  CHECK(count_kind(T4, GenKind::Root) == 1);
  numeric_agree("sqrt(z)*sqrt(z+1) + sqrt(z^2+z)");
  auto [T5, e5] = B("sqrt(z)*sqrt(z+1) + sqrt(z^2+z)");
  CHECK(count_kind(T5, GenKind::Root) == 2);

  CHECK_THROWS_AS(B("z^(1/3)"), AlgebraicMonomialUnsupported);
}

TEST_CASE("tower derivation") {
  auto [T, e] = B("exp(z)");
  const Level& L = T.top();
  Elem th2 = mul(L, gen(L), gen(L));
  CHECK(eq(L, tower_derive(T, th2), scale(L, th2, Q(2))));

  auto [T2, e2] = B("log(z)");
  const Level& L2 = T2.top();
  Elem z = lift(L2, *T2.zlevel, gen(*T2.zlevel));
  CHECK(eq(L2, tower_derive(T2, gen(L2)), inv(L2, z)));

  ConstField F = parse_constants("t; a^2-2");
  auto [T3, e3] = B("t*a + 3", F);
  CHECK(is_zero(T3.top(), tower_derive(T3, e3)));
}

TEST_CASE("constant recognition") {
  auto [T, e] = B("5/7");
  CHECK(tower_is_constant(T, e));
  auto [T2, e2] = B("z");
  CHECK(!tower_is_constant(T2, e2));
  auto [T3, e3] = B("exp(z)*exp(-z)");
  CHECK(tower_is_constant(T3, e3));
  CHECK(is_one(T3.top(), e3));
}

TEST_CASE("Leibniz rule on random pairs") {
  ConstField F = parse_constants("i^2+1");
  Built b = tower_build_all({parse("exp(z)", F), parse("log(z+1)", F), parse("exp(z^2/2)", F), parse("sqrt(z+2)", F)}, F);
  const DiffTower& T = b.tower;
  const Level& L = T.top();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 3), c(-3, 3);
  Elem z = lift(L, *T.zlevel, gen(*T.zlevel));
  auto rnd = [&]() {
    Elem r = from_int(L, c(rng));
    for (int k = 0; k < 3; ++k) {
      Elem f = b.elems[pick(rng)];
      if (c(rng) > 0) f = mul(L, f, z);
      if (c(rng) > 2) f = inv(L, add(L, f, from_int(L, 1 + pick(rng))));
      r = add(L, r, scale(L, f, Q(c(rng))));
    }
    return r;
  };
  for (int i = 0; i < 500; ++i) {
    Elem x = rnd(), y = rnd();
    Elem lhs = tower_derive(T, mul(L, x, y));
    Elem rhs = add(L, mul(L, tower_derive(T, x), y), mul(L, x, tower_derive(T, y)));
    CHECK(eq(L, lhs, rhs));
  }
}

TEST_CASE("rebuilding a printed element gives an isomorphic tower") {
  ConstField F;
  testing::ExprGen g(77);
  int ok = 0;
  for (int i = 0; i < 60; ++i) {
    Expr e = g.gen(3);
    std::pair<DiffTower, Elem> a;
    try {
      a = tower_build(e, F);
    } catch (const std::exception&) {
      continue;
    }
    Expr p = a.first.to_expr(a.second);
    auto b = tower_build(p, a.first.field);
    std::multiset<int> k1, k2;
    for (auto& m : a.first.monomials) k1.insert(static_cast<int>(m.level->gen));
    for (auto& m : b.first.monomials) k2.insert(static_cast<int>(m.level->gen));
    CHECK_MESSAGE(k1 == k2, print(e));
    for (cplx z : {cplx(0.8, 0.2), cplx(1.7, -0.1)}) {
      NumEnv ea = tower_numeric_env(a.first, z);
      std::map<std::string, cplx> given;
      for (auto& f : a.first.fresh) given[f.name] = ea.values.at(f.name);
      cplx u = eval(p, ea);
      cplx v = eval(b.first.to_expr(b.second), tower_numeric_env(b.first, z, given));
      CHECK_MESSAGE(std::abs(u - v) <= 1e-8 * std::max(1.0, std::abs(u)), print(p));
    }
    ++ok;
  }
  CHECK(ok > 30);
}

TEST_CASE("constant extension embeds the tower") {
  auto [T, e] = B("exp(z)/(z^2+1) + log(z)");
  auto ext = cf_extend_algebraic(T.field, Poly{one(T.field.level()), zero(T.field.level()), one(T.field.level())}, "i");
  DiffTower N = tower_extend_constants(T, ext.field);
  Elem e2 = tower_translate(T, N, e);
  CHECK(print(N.to_expr(e2)) == print(T.to_expr(e)));
  Elem d1 = tower_translate(T, N, tower_derive(T, e));
  CHECK(eq(N.top(), d1, tower_derive(N, e2)));
}

TEST_CASE("dump lists the monomials") {
  auto [T, e] = B("exp(z) + log(z+1)");
  std::string d = tower_dump(T);
  CHECK(d.find("th1 = exp(z)") != std::string::npos);
  CHECK(d.find("th2 = log(z + 1)") != std::string::npos);
}

TEST_CASE("complex roots") {
  auto r = preferred_root({cplx(1), cplx(0), cplx(1)});
  CHECK(std::abs(r - cplx(0, 1)) < 1e-12);
  auto s = preferred_root({cplx(-2), cplx(0), cplx(1)});
  CHECK(std::abs(s - std::sqrt(2.0)) < 1e-12);
}
