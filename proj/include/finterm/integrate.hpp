// Risch integration over transcendental exp/log towers.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finterm/tower.hpp"

namespace finterm {

struct LogTerm {
  Elem c;  // constant, element of tower.field
  Elem v;  // element of tower.top()
};

enum class NonElemStage { ResidueNotConstant, RDEUnsolvable, PolynomialPartObstruction, SpecialCriterion };
const char* stage_name(NonElemStage s);

struct IntegrationResult {
  enum Kind { Elementary, NotElementary, Unsupported } kind = Unsupported;
  NonElemStage stage = NonElemStage::RDEUnsolvable;
  std::string detail;
  DiffTower tower;  // input tower, possibly over a larger constant field
  Elem f;           // integrand in `tower`
  Elem v0;
  std::vector<LogTerm> logs;

  Expr antiderivative() const;
  // derive(v0) + sum c derive(v)/v - f
  Elem residual() const;
};

// ∫f = g + ∫h with h of squarefree normal denominator (f at a Var/Exp/Log level)
std::pair<Elem, Elem> hermite_reduce(const DiffTower& T, const Level& L, const Elem& f);

struct RTResult {
  bool constant_residues = true;
  std::vector<LogTerm> logs;  // v at level L
  Elem rest;                  // h - sum c v'/v, in L.base
  std::optional<Poly> extension;  // irreducible polynomial over the constants to adjoin
};
// h proper with squarefree normal denominator
RTResult rothstein_trager(const DiffTower& T, const Level& L, const Elem& h);

IntegrationResult risch_integrate(const Elem& f, const DiffTower& T);
IntegrationResult risch_integrate(const Expr& f, const ConstField& F, const std::string& var = "z");

// y' + f y = g over level L of T
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::optional<Elem> rde_solve(const DiffTower& T, const Level& L, const Elem& f, const Elem& g);

}  // namespace finterm
