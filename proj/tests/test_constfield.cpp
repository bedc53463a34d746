#include <random>

#include "doctest.h"
#include "finterm/constfield.hpp"
#include "finterm/expr.hpp"
#include "finterm/factor.hpp"

using namespace finterm;

namespace {

ConstField field_of(const std::string& decl) { return parse_constants(decl); }

ConstVal cv(const ConstField& F, const std::string& s) { return expr_to_const(parse(s, F), F); }

Q rq(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(-5, 5), d(1, 4);
  Q q(n(rng), d(rng));
  q.canonicalize();
  return q;
}

// random element of Q(t)[a], a^2 = 2
ConstVal random_elem(const ConstField& F, std::mt19937_64& rng) {
  const Level& A = F.level();
  const Level& T = *A.base;
  auto rpoly = [&](int dg) {
    Poly p;
    for (int i = 0; i <= dg; ++i) p.push_back(from_q(*T.base, rq(rng)));
    trim(*T.base, p);
    return p;
  };
  auto rfrac = [&]() {
    Poly d = rpoly(1);
    if (d.empty()) d = {one(*T.base)};
    return frac(T, rpoly(2), d);
  };
  return alg_elem(A, {rfrac(), rfrac()});
}

}  // namespace

TEST_CASE("constant field arithmetic") {
  ConstField Q0;
  CHECK(eq(Q0.level(), cf_arith(Q0, ArithOp::Add, from_q(Q0.level(), Q(1, 2)), from_q(Q0.level(), Q(1, 3))),
           from_q(Q0.level(), Q(5, 6))));

  ConstField F = field_of("a^2-2");
  ConstVal a = F.symbol("a");
  ConstVal aa = cf_arith(F, ArithOp::Mul, a, a);
  CHECK(eq(F.level(), aa, from_int(F.level(), 2)));

  ConstField T = field_of("t");
  ConstVal num = cv(T, "(1+t)*(1-t)");
  ConstVal q = cf_arith(T, ArithOp::Div, num, cv(T, "1-t"));
  CHECK(eq(T.level(), q, cv(T, "1+t")));
  CHECK_THROWS_AS(cf_arith(T, ArithOp::Div, q, zero(T.level())), DivisionByZero);
}

TEST_CASE("constant classification") {
  ConstField F = field_of("t; a^2-2");
  auto c1 = cf_classify(F, cv(F, "6/3"));
  CHECK(c1.kind == ConstClass::Integer);
  CHECK(c1.value == 2);
  CHECK(cf_classify(F, cv(F, "a")).kind == ConstClass::AlgebraicIrrational);
  CHECK(cf_classify(F, cv(F, "t+1")).kind == ConstClass::TranscendentalInvolving);
  CHECK(cf_classify(F, cv(F, "0")).kind == ConstClass::Zero);
  auto c2 = cf_classify(F, cv(F, "a*a/4"));
  CHECK(c2.kind == ConstClass::NonzeroRational);
  CHECK(c2.value == Q(1, 2));
  CHECK(cf_classify(F, cv(F, "t*a - a*t")).kind == ConstClass::Zero);
}

TEST_CASE("algebraic extensions") {
  ConstField Q0;
  const Level& K = Q0.level();
  Poly x2m2{from_int(K, -2), zero(K), one(K)};
  auto e1 = cf_extend_algebraic(Q0, x2m2, "alpha");
  REQUIRE(e1.roots.size() == 1);
  const Level& L1 = e1.field.level();
  CHECK(eq(L1, mul(L1, e1.roots[0], e1.roots[0]), from_int(L1, 2)));

  Poly x2m1{from_int(K, -1), zero(K), one(K)};
  auto e2 = cf_extend_algebraic(Q0, x2m1, "alpha");
  CHECK(e2.roots.size() == 2);
  CHECK(e2.field.symbols().empty());

  Poly x2p1{one(K), zero(K), one(K)};
  auto e3 = cf_extend_algebraic(Q0, x2p1, "alpha");
  const Level& L3 = e3.field.level();
  auto cl = cf_classify(e3.field, mul(L3, e3.roots[0], e3.roots[0]));
  CHECK(cl.kind == ConstClass::Integer);
  CHECK(cl.value == -1);

  Poly sq{one(K), from_int(K, 2), one(K)};
  CHECK_THROWS_AS(cf_extend_algebraic(Q0, sq, "alpha"), NotSquarefree);

  // (x^2-2)(x^2-3): two roots over a degree-4 field
  Poly p = pmul(K, x2m2, Poly{from_int(K, -3), zero(K), one(K)});
  auto e4 = cf_extend_algebraic(Q0, p, "alpha");
  CHECK(e4.roots.size() == 2);
  CHECK(e4.field.symbols().size() == 2);
}

TEST_CASE("constant declarations") {
  ConstField F = field_of("t1,t2; a^2-2; b^2+1");
  CHECK(F.symbols() == std::vector<std::string>{"t1", "t2", "a", "b"});
  CHECK_THROWS(field_of("a^2-4"));
  CHECK_THROWS(field_of("a^2-2; b^2-8"));
  CHECK_NOTHROW(field_of("a^2-2; b^2-3"));
}

TEST_CASE("field axioms on random triples") {
  ConstField F = field_of("t; a^2-2");
  const Level& L = F.level();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    ConstVal a = random_elem(F, rng), b = random_elem(F, rng), c = random_elem(F, rng);
    CHECK(eq(L, add(L, add(L, a, b), c), add(L, a, add(L, b, c))));
    CHECK(eq(L, mul(L, a, add(L, b, c)), add(L, mul(L, a, b), mul(L, a, c))));
    // canonicalization is idempotent: rebuilding the representation changes nothing
    Poly rep = a.n;
    Poly rebuilt;
    for (auto& x : rep) rebuilt.push_back(frac(*L.base, x.n, x.d));
    ConstVal a2 = alg_elem(L, rebuilt);
    CHECK(eq(L, a, a2));
    CHECK(a2.n.size() == a.n.size());
    if (!is_zero(L, b)) CHECK(eq(L, mul(L, div(L, a, b), b), a));
  }
}

TEST_CASE("integer classification is consistent") {
  ConstField F = field_of("t; a^2-2");
  const Level& L = F.level();
  std::mt19937_64 rng(11);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    ConstVal x = random_elem(F, rng);
    ConstVal y = mul(L, x, x);
    ConstVal z = i % 3 == 0 ? from_int(L, (i % 7) - 3) : (i % 3 == 1 ? sub(L, y, y) : y);
    auto cl = cf_classify(F, z);
    if (cl.kind == ConstClass::Integer) {
      ++hits;
      CHECK(is_zero(L, sub(L, z, from_q(L, cl.value))));
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("extension embedding preserves identities") {
  ConstField F = field_of("t");
  const Level& K = F.level();
  Poly m{from_int(K, -2), zero(K), one(K)};
  auto ext = cf_extend_algebraic(F, m, "alpha");
  const Level& L = ext.field.level();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto rnd = [&]() {
      Poly n{from_q(*K.base, rq(rng)), from_q(*K.base, rq(rng))};
      Poly d{from_q(*K.base, rq(rng)), one(*K.base)};
      trim(*K.base, n);
      return frac(K, n, d);
    };
    ConstVal a = rnd(), b = rnd();
    ConstVal s = add(K, a, b), p = mul(K, a, b);
    CHECK(eq(L, ext.embed(F, s), add(L, ext.embed(F, a), ext.embed(F, b))));
    CHECK(eq(L, ext.embed(F, p), mul(L, ext.embed(F, a), ext.embed(F, b))));
  }
}

TEST_CASE("square roots in fields") {
  ConstField F = field_of("t; i^2+1");
  const Level& L = F.level();
  CHECK(sqrt_in_field(L, from_int(L, -1)).has_value());
  CHECK(sqrt_in_field(L, from_int(L, 4)).has_value());
  CHECK(!sqrt_in_field(L, from_int(L, 2)).has_value());
  auto r = sqrt_in_field(L, cv(F, "2*i"));
  REQUIRE(r.has_value());
  CHECK(eq(L, mul(L, *r, *r), cv(F, "2*i")));
}
