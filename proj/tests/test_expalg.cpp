#include "corpus.hpp"
#include "doctest.h"
#include "finterm/expalg.hpp"

using namespace finterm;

namespace {

Expr P(const std::string& s, const ConstField& F, std::vector<std::string> vars = {"z"}) {
  ParseOptions po;
  po.vars = std::move(vars);
  return parse(s, F, po);
}

// (dW/dx)^2 == rhs in a common tower
bool squared_derivative_is(const Expr& W, const Expr& rhs, const ConstField& F, const std::string& var) {
  Expr d = differentiate(W, var);
  Built b = tower_build_all({e_mul(d, d), rhs}, F, var);
  return eq(b.tower.top(), b.elems[0], b.elems[1]);
}

Q q(long a, long b = 1) {
  Q r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("exp-algebraic integrals: examples") {
  ConstField F;
  CHECK(decide_expalg_integral(P("exp(-z^2)", F), F).kind == ExpAlgDecision::NotExpAlgebraic);
  CHECK(decide_expalg_integral(P("1/sqrt(z^3 - z)", F), F).kind == ExpAlgDecision::NotExpAlgebraic);
  auto d = decide_expalg_integral(P("2*z*exp(z^2)", F), F);
  REQUIRE(d.kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(d.via == ExpAlgDecision::ElementaryEquivalence);
  CHECK(exact_derivative_check(e_sub(d.witness, P("exp(z^2)", F)), e_num(Q(0)), d.field));
  CHECK_THROWS_AS(decide_expalg_integral(e_inv("W", e_var("z"), P("w*exp(w)", F, {"w"}), "w"), F), InverseSymPresent);
}

TEST_CASE("exp-algebraic integrals: corpus relabels integration") {
  for (auto& c : integrand_corpus()) {
    ConstField F = parse_constants(c.constants);
    Expr f = P(c.f, F);
    auto d = decide_expalg_integral(f, F);
    auto s = integrate_elementary(f, F);
    CAPTURE(c.f);
    CHECK((d.kind == ExpAlgDecision::ExpAlgebraic) == (s.kind == SpecialResult::Elementary));
    CHECK((d.kind == ExpAlgDecision::NotExpAlgebraic) == (s.kind == SpecialResult::NotElementary));
    CHECK((d.kind == ExpAlgDecision::ExpAlgebraic) == c.elementary);
    if (d.kind == ExpAlgDecision::ExpAlgebraic) CHECK(squared_derivative_is(d.witness, e_mul(f, f), d.field, "z"));
  }
}

TEST_CASE("local inverses") {
  ConstField F;
  Expr Fw = P("w*exp(w)", F, {"w"});
  auto d = decide_inverse_integral(Fw, P("w/z", F, {"z", "w"}), F);
  REQUIRE(d.kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(d.via == ExpAlgDecision::ChangeOfVariables);
  CHECK(print(d.witness) == "W(z)^2/2 + W(z)");
  Expr H = substitute_inverse(d.witness, "W", [](const Expr&) { return e_var("w"); });
  CHECK(exact_derivative_check(H, P("1 + w", F, {"w"}), d.field, "w"));

  CHECK(decide_inverse_integral(Fw, P("w/z^2", F, {"z", "w"}), F).kind == ExpAlgDecision::NotExpAlgebraic);
}

TEST_CASE("local inverses: identity change of variables agrees on the corpus") {
  int n = 0;
  for (auto& c : integrand_corpus()) {
    ConstField F = parse_constants(c.constants);
    Expr f = P(c.f, F);
    auto a = decide_expalg_integral(f, F);
    auto b = decide_inverse_integral(e_var("w"), f, F);
    CAPTURE(c.f);
    CHECK(a.kind == b.kind);
    if (++n == 20) break;
  }
  CHECK(n == 20);
}

TEST_CASE("Hamiltonian systems") {
  ConstField F;
  ConstField Fi = parse_constants("; i^2+1");
  auto h = decide_hamiltonian(P("x^2", F, {"x"}), one(F.level()), F);
  REQUIRE(h.kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(h.via == ExpAlgDecision::EnergyCriterion);
  CHECK(squared_derivative_is(h.witness, P("1 - x^2", F, {"x"}), h.field, "x"));
  CHECK(decide_hamiltonian(P("x^3", F, {"x"}), one(F.level()), F).kind == ExpAlgDecision::NotExpAlgebraic);
  auto c = decide_hamiltonian(P("-cos(x)", Fi, {"x"}), one(Fi.level()), Fi);
  REQUIRE(c.kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(squared_derivative_is(c.witness, P("1 + cos(x)", Fi, {"x"}), c.field, "x"));
  CHECK(decide_hamiltonian(P("exp(x)*x", F, {"x"}), one(F.level()), F).kind == ExpAlgDecision::Unsupported);
}

TEST_CASE("pendulum") {
  ConstField F;
  const Level& K = F.level();
  auto c = [&](const Q& v) { return from_q(K, v); };
  auto d1 = decide_pendulum(c(1), c(1), F);
  REQUIRE(d1.kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(squared_derivative_is(d1.witness, P("1/((1-u^2)*u^2)", F, {"u"}), d1.field, "u"));
  CHECK(decide_pendulum(c(1), c(-1), F).kind == ExpAlgDecision::ExpAlgebraic);
  CHECK(decide_pendulum(c(1), c(0), F).kind == ExpAlgDecision::NotExpAlgebraic);
  CHECK_THROWS_AS(decide_pendulum(c(0), c(1), F), ZeroFrequency);
}

TEST_CASE("pendulum: sign and scaling covariance") {
  ConstField F;
  const Level& K = F.level();
  std::vector<Q> omegas{q(1), q(2), q(-3), q(1, 2)}, energies{q(1), q(-1), q(0), q(4), q(-4), q(1, 4), q(9)},
      scales{q(2), q(-1, 3), q(5)};
  for (auto& w : omegas)
    for (auto& h : energies) {
      auto base = decide_pendulum(from_q(K, w), from_q(K, h), F).kind;
      CAPTURE(w);
      CAPTURE(h);
      CHECK(base == ((h == w * w || h == -w * w) ? ExpAlgDecision::ExpAlgebraic : ExpAlgDecision::NotExpAlgebraic));
      CHECK(decide_pendulum(from_q(K, Q(-w)), from_q(K, h), F).kind == base);
      for (auto& s : scales)
        CHECK(decide_pendulum(from_q(K, Q(w * s)), from_q(K, Q(h * s * s)), F).kind == base);
    }
}

TEST_CASE("pendulum: lambda criterion against the quartic test") {
  ConstField F;
  const Level& K = F.level();
  std::vector<Q> lambdas{q(0), q(1), q(2), q(-1), q(1, 2), q(3), q(-2, 3), q(5, 4), q(7), q(1, 3),
                         q(-5), q(9, 2), q(1, 7), q(-1, 4), q(11)};
  for (auto& lam : lambdas) {
    // omega = 1, h0 = 1 - 2 lambda
    auto d = decide_pendulum(one(K), from_q(K, Q(1 - 2 * lam)), F);
    Poly P4{from_q(K, Q(-lam)), zero(K), from_q(K, Q(1 + lam)), zero(K), from_int(K, -1)};
    auto e = elliptic_first_kind(P4, one(K), F, "u");
    CAPTURE(lam);
    CHECK((d.kind == ExpAlgDecision::ExpAlgebraic) == (e.kind == SpecialResult::Elementary));
    CHECK((d.kind == ExpAlgDecision::ExpAlgebraic) == (lam == 0 || lam == 1));
  }
}
