// Exponential algebraicity of antiderivatives, inverse-function integrands,
// one-degree-of-freedom Hamiltonians and the pendulum.
#pragma once

#include "finterm/special.hpp"

namespace finterm {

struct ExpAlgDecision {
  enum Kind { ExpAlgebraic, NotExpAlgebraic, Unsupported } kind = Unsupported;
  enum Via { ElementaryEquivalence, ChangeOfVariables, EnergyCriterion } via = ElementaryEquivalence;
  Expr witness;
  std::string reason;
  std::vector<std::string> path;
  ConstField field;  // constants mentioned by the witness
  std::vector<FreshConstant> fresh;
};
const char* kind_name(ExpAlgDecision::Kind k);
const char* via_name(ExpAlgDecision::Via v);

struct ZeroFrequency : std::invalid_argument {
  ZeroFrequency() : std::invalid_argument("omega must be nonzero") {}
};

ExpAlgDecision decide_expalg_integral(const Expr& f, const ConstField& F, const std::string& var = "z");
// y = H(W(z)) with W a local inverse of F(w) and h(w) = G(F(w), w) F'(w)
ExpAlgDecision decide_inverse_integral(const Expr& Fw, const Expr& G, const ConstField& F, const std::string& name = "W",
                                       const std::string& zvar = "z", const std::string& wvar = "w");
// (dy/dx)^2 = h0 - V(x)
ExpAlgDecision decide_hamiltonian(const Expr& V, const ConstVal& h0, const ConstField& F, const std::string& var = "x");
// lambda = (omega^2 - h0) / (2 omega^2), quartic (1-u^2)(u^2-lambda)
ExpAlgDecision decide_pendulum(const ConstVal& omega, const ConstVal& h0, const ConstField& F);

}  // namespace finterm
