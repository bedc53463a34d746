// Finitely presented blurred-exponential towers under free semantics:
// relation lattices, predimension, hulls, exponential transcendence degree
// and self-sufficiency.
//
// Free semantics: the only algebraic relations among generators are the
// ones forced by the declared Γ-pairs and their Q-linear collapses. All
// numbers computed here describe the generic realization of a presentation;
// they do not certify transcendence of particular analytic functions.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "finterm/constfield.hpp"
#include "finterm/expr.hpp"

namespace finterm {

struct BlurredGen {
  enum Kind { NewExp, NewLog, FreeGen, Defined } kind = FreeGen;
  std::string name;
  Expr arg;  // exp/log argument, or the definition
  int line = 0;
};

struct BlurredPresentation {
  bool has_z = true;
  ConstField field;  // transcendental constant symbols only
  std::vector<BlurredGen> gens;
  std::vector<int> cut;  // generators of k
  std::vector<int> target;

  int index(const std::string& name) const;  // -1 if absent
  std::vector<int> pairs() const;            // generators carrying a Γ-pair
};

struct PresentationError : std::runtime_error {
  int line;
  size_t column;
  std::string text;
  PresentationError(int line, size_t column, std::string text, const std::string& msg);
  std::string caret() const;
};
struct UnfactorableArgument : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyGenerators : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// line format: base z | base const, const NAME, gen NAME = exp(..) | log(..) | free | <expr>,
// cut N | cut NAME..., target NAME...; '#' starts a comment
BlurredPresentation parse_presentation(const std::string& text);
std::string format_gen(const BlurredPresentation& P, int i);

struct RelationLattice {
  std::vector<int> columns;           // generator indices of the pairs
  std::vector<std::vector<Z>> rows;   // saturated basis in Hermite normal form
  std::vector<Z> invariants;          // Smith invariants of `rows`
  bool saturated = true;
};
RelationLattice relation_lattice(const BlurredPresentation& P);

// integer lattice helpers
std::vector<std::vector<Z>> hermite_normal_form(std::vector<std::vector<Z>> rows);
// Smith invariants and a unimodular V with rows = U * diag * V
std::vector<Z> smith_normal_form(const std::vector<std::vector<Z>>& rows, std::vector<std::vector<Z>>* V = nullptr);
// integer points of the rational row space
std::vector<std::vector<Z>> saturate(const std::vector<std::vector<Z>>& rows);

class BlurredCalculus {
 public:
  explicit BlurredCalculus(const BlurredPresentation& P, int points = 3);
  ~BlurredCalculus();
  BlurredCalculus(const BlurredCalculus&) = delete;
  BlurredCalculus& operator=(const BlurredCalculus&) = delete;

  const BlurredPresentation& presentation() const;
  // transcendence degree of C(base, S)
  int td(const std::vector<int>& S) const;
  // dimension of the pair combinations with both coordinates in C(base, S)^alg
  int pair_dim(const std::vector<int>& S) const;
  // rational basis of those combinations, in pair coordinates
  std::vector<std::vector<Q>> pair_space(const std::vector<int>& S) const;
  // δ(C(base, k ∪ M)^alg / C(base, k)^alg)
  int delta(const std::vector<int>& M, const std::vector<int>& k) const;
  // upper bound for δ of C(base, k ∪ M)^alg ∩ C(base, k ∪ N)^alg over C(base, k)^alg
  int delta_meet(const std::vector<int>& M, const std::vector<int>& N, const std::vector<int>& k) const;
  // generators whose symbol is forced to be algebraic over earlier ones
  const std::vector<bool>& dependent() const;

 private:
  struct Impl;
  Impl* impl_;
};

int predim(const BlurredPresentation& P);

struct HullResult {
  std::vector<int> gens;  // a generating set of the hull field, target first
  int td = 0;             // over the base
  int delta = 0;          // over the base
  std::vector<std::vector<Z>> pair_basis;  // Hermite normal form, pair coordinates
  std::vector<std::string> lines;          // presentation of the hull
};
HullResult hull(const BlurredPresentation& P, const std::vector<int>& target, int max_gens = 16);
int etd(const BlurredPresentation& P, const std::vector<int>& target, int max_gens = 16);
// δ(M/k) >= 0 for every M between k (the cut) and L
bool self_sufficient(const BlurredPresentation& P, int max_gens = 16);

}  // namespace finterm
