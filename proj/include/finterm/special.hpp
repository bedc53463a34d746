// Algebraic integrands: first-kind radicals, square roots of low degree
// radicands, and Chebyshev integrals z^p (1-z)^q.
#pragma once

#include <string>
#include <vector>

#include "finterm/integrate.hpp"

namespace finterm {

struct SpecialResult {
  enum Kind { Elementary, NotElementary, Unsupported } kind = Unsupported;
  Expr antiderivative;  // in the input variable
  std::string detail;
  std::vector<std::string> path;
  ConstField field;  // constants mentioned by the witness
  std::vector<FreshConstant> fresh;
};

// c / sqrt(P), deg P in {3, 4}, c a nonzero constant
SpecialResult elliptic_first_kind(const Poly& P, const ConstVal& c, const ConstField& F, const std::string& var = "z");
// z^p (1-z)^q
SpecialResult chebyshev(const Q& p, const Q& q, const std::string& var = "z");
// f in C(z) or C(z)(sqrt(P)) with P a polynomial; exp/log towers go straight to Risch
SpecialResult integrate_elementary(const Expr& f, const ConstField& F, const std::string& var = "z");

// d/dz W == f in a common tower
bool exact_derivative_check(const Expr& W, const Expr& f, const ConstField& F, const std::string& var = "z");

Expr poly_to_expr(const ConstField& F, const Poly& p, const std::string& var);

}  // namespace finterm
