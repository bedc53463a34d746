// Univariate factorization over Q (Zassenhaus) and over algebraic
// number-field levels (Trager norms).
#pragma once

#include <utility>
#include <vector>

#include "finterm/field.hpp"

namespace finterm {

using ZPoly = std::vector<Z>;

struct Factorization {
  Elem unit;                               // leading coefficient
  std::vector<std::pair<Poly, int>> factors;  // monic irreducible, multiplicity
};

// true when `factor` is available over K
bool can_factor(const Level& K);

// throws FactorUnsupported when K is not Q, a number-field tower over Q,
// or a constant transcendental level whose input lies below it
Factorization factor(const Level& K, const Poly& p);
// irreducible factors of a squarefree polynomial
std::vector<Poly> factor_squarefree(const Level& K, const Poly& p);
// roots in K of p (no multiplicities)
std::vector<Elem> roots(const Level& K, const Poly& p);
bool is_irreducible(const Level& K, const Poly& p);

// norm of p in L[x] down to L.base[x], L algebraic
Poly norm_down(const Level& L, const Poly& p);

// integer polynomial helpers
ZPoly to_primitive_z(const Poly& p);  // p over Q
Poly from_z(const ZPoly& p);
std::vector<ZPoly> zassenhaus(const ZPoly& f);  // f squarefree primitive, lc > 0

}  // namespace finterm
