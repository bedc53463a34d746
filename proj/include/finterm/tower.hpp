// Differential towers C0(z)(th1, ..., thn) with certified exp, log and
// square-root monomials.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "finterm/constfield.hpp"
#include "finterm/expr.hpp"

namespace finterm {

struct CannotCertifyMonomial : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AlgebraicMonomialUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// constant adjoined while building: a branch constant, exp(c), or sqrt(c)
struct FreshConstant {
  std::string name;
  Expr def;  // numeric definition (may mention the variable; its value is constant)
};

struct Monomial {
  LevelPtr level;
  Expr expr;  // exp(u), log(u) or sqrt(u) in surface syntax
  Elem w;     // log-derivative contribution: u'/u for log, u' for exp (element of `level`)
};

struct DiffTower {
  ConstField field;
  std::vector<FreshConstant> fresh;
  std::string var = "z";
  LevelPtr zlevel;
  std::vector<Monomial> monomials;  // bottom-up, above z

  const Level& top() const { return monomials.empty() ? *zlevel : *monomials.back().level; }
  LevelPtr top_ptr() const { return monomials.empty() ? zlevel : monomials.back().level; }
  const Monomial* monomial(const Level& L) const;
  Expr gen_expr(const Level& L) const;
  Expr to_expr(const Level& L, const Elem& e) const;
  Expr to_expr(const Elem& e) const { return to_expr(top(), e); }
  const FreshConstant* fresh_def(const std::string& name) const;
};

struct Built {
  DiffTower tower;
  std::vector<Elem> elems;  // at tower.top()
};

// all expressions share one tower
Built tower_build_all(const std::vector<Expr>& es, const ConstField& field, const std::string& var = "z");
std::pair<DiffTower, Elem> tower_build(const Expr& e, const ConstField& field, const std::string& var = "z");

Elem tower_derive(const DiffTower& T, const Elem& x);
bool tower_is_constant(const DiffTower& T, const Elem& x);
std::string tower_dump(const DiffTower& T);

// same tower over a larger constant field (F must extend T.field by algebraic levels on top)
DiffTower tower_extend_constants(const DiffTower& T, const ConstField& F);
Elem tower_translate(const DiffTower& from, const DiffTower& to, const Level& L, const Elem& e);
Elem tower_translate(const DiffTower& from, const DiffTower& to, const Elem& e);
// level of `to` corresponding to level L of `from`
const Level& tower_level(const DiffTower& from, const DiffTower& to, const Level& L);

// numeric values of the constants and the variable at a point; `given` overrides
NumEnv tower_numeric_env(const DiffTower& T, cplx z, const std::map<std::string, cplx>& given = {});
// roots of a complex polynomial (low degree first)
std::vector<cplx> complex_roots(const std::vector<cplx>& coeffs);
// the root chosen for an algebraic constant: largest imaginary part, then largest real part
cplx preferred_root(const std::vector<cplx>& coeffs);

// Q-vectors of elements under a fixed injective Q-linear map
std::vector<std::vector<Q>> flatten(const Level& L, const std::vector<Elem>& es);
// rational x with sum x_k vs_k = target, if any
std::optional<std::vector<Q>> span_solve(const Level& L, const Elem& target, const std::vector<Elem>& vs);
// rational solution of A x = b (rows of A), if any
std::optional<std::vector<Q>> solve_rational(const std::vector<std::vector<Q>>& A, const std::vector<Q>& b);

}  // namespace finterm
