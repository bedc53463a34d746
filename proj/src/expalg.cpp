#include "finterm/expalg.hpp"

namespace finterm {

const char* kind_name(ExpAlgDecision::Kind k) {
  switch (k) {
    case ExpAlgDecision::ExpAlgebraic: return "exp-algebraic";
    case ExpAlgDecision::NotExpAlgebraic: return "not exp-algebraic";
    default: return "unsupported";
  }
}

const char* via_name(ExpAlgDecision::Via v) {
  switch (v) {
    case ExpAlgDecision::ElementaryEquivalence: return "ElementaryEquivalence";
    case ExpAlgDecision::ChangeOfVariables: return "ChangeOfVariables";
    default: return "EnergyCriterion";
  }
}

namespace {

ExpAlgDecision relabel(const SpecialResult& r, ExpAlgDecision::Via via, std::vector<std::string> path) {
  ExpAlgDecision d;
  d.via = via;
  d.field = r.field;
  d.fresh = r.fresh;
  d.path = std::move(path);
  d.path.insert(d.path.end(), r.path.begin(), r.path.end());
  d.reason = r.detail;
  switch (r.kind) {
    case SpecialResult::Elementary:
      d.kind = ExpAlgDecision::ExpAlgebraic;
      d.witness = r.antiderivative;
      d.path.push_back("elementary");
      break;
    case SpecialResult::NotElementary:
      d.kind = ExpAlgDecision::NotExpAlgebraic;
      d.path.push_back("not elementary");
      break;
    default:
      d.kind = ExpAlgDecision::Unsupported;
  }
  return d;
}

}  // namespace

ExpAlgDecision decide_expalg_integral(const Expr& f, const ConstField& F, const std::string& var) {
  if (contains_inverse(f)) throw InverseSymPresent();
  return relabel(integrate_elementary(f, F, var), ExpAlgDecision::ElementaryEquivalence, {"integral"});
}

ExpAlgDecision decide_inverse_integral(const Expr& Fw, const Expr& G, const ConstField& F, const std::string& name,
                                       const std::string& zvar, const std::string& wvar) {
  if (contains_inverse(Fw) || contains_inverse(G)) throw InverseSymPresent();
  Expr h = e_mul(substitute(G, zvar, Fw), differentiate(Fw, wvar));
  auto d = relabel(integrate_elementary(h, F, wvar), ExpAlgDecision::ChangeOfVariables,
                   {"change of variables z = " + print(Fw), "h(" + wvar + ") = " + print(h)});
  if (d.kind == ExpAlgDecision::ExpAlgebraic)
    d.witness = substitute(d.witness, wvar, e_inv(name, e_var(zvar), Fw, wvar));
  return d;
}

ExpAlgDecision decide_hamiltonian(const Expr& V, const ConstVal& h0, const ConstField& F, const std::string& var) {
  if (contains_inverse(V)) throw InverseSymPresent();
  Expr U = e_pow(e_sub(const_to_expr(F, h0), V), Q(1, 2));
  return relabel(integrate_elementary(U, F, var), ExpAlgDecision::EnergyCriterion, {"U = " + print(U)});
}

ExpAlgDecision decide_pendulum(const ConstVal& omega, const ConstVal& h0, const ConstField& F) {
  const Level& K = F.level();
  if (is_zero(K, omega)) throw ZeroFrequency();
  Elem w2 = mul(K, omega, omega);
  Elem lam = div(K, sub(K, w2, h0), scale(K, w2, Q(2)));
  bool degenerate = is_zero(K, lam) || is_one(K, lam);
  // (1 - u^2)(u^2 - lambda)
  Poly P{neg(K, lam), zero(K), add(K, one(K), lam), zero(K), from_int(K, -1)};
  SpecialResult r = elliptic_first_kind(P, one(K), F, "u");
  if ((r.kind == SpecialResult::Elementary) != degenerate)
    throw std::logic_error("pendulum criterion disagrees with the quartic radicand test");
  return relabel(r, ExpAlgDecision::EnergyCriterion,
                 {"lambda = " + print(const_to_expr(F, lam)), degenerate ? "lambda in {0, 1}" : "lambda not in {0, 1}",
                  "u = cos(theta/2)"});
}

}  // namespace finterm
