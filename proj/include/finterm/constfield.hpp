// Constant fields Q(t1..tk)[a1..am] presented by transcendentals and
// explicit minimal polynomials.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finterm/field.hpp"

namespace finterm {

using ConstVal = Elem;

struct ConstField {
  LevelPtr top = base_level();

  const Level& level() const { return *top; }
  // levels from Q upwards
  std::vector<LevelPtr> chain() const;
  std::vector<std::string> symbols() const;
  // level of a named generator, or nullptr
  LevelPtr find(const std::string& name) const;
  ConstVal symbol(const std::string& name) const;

  ConstField with_transcendental(const std::string& name) const;
  ConstField with_algebraic(const std::string& name, const Poly& minpoly) const;
};

enum class ArithOp { Add, Sub, Mul, Div };
ConstVal cf_arith(const ConstField& F, ArithOp op, const ConstVal& a, const ConstVal& b);

enum class ConstClass { Zero, Integer, NonzeroRational, AlgebraicIrrational, TranscendentalInvolving };
struct Classification {
  ConstClass kind;
  Q value;  // for Integer and NonzeroRational
};
Classification cf_classify(const ConstField& F, const ConstVal& a);
const char* class_name(ConstClass c);

struct NotSquarefree : std::invalid_argument {
  NotSquarefree() : std::invalid_argument("polynomial is not squarefree") {}
};

struct Extension {
  ConstField field;
  std::vector<ConstVal> roots;  // one root per irreducible factor, in the new field
  ConstVal embed(const ConstField& old, const ConstVal& v) const;
};
// adjoin roots of a monic squarefree polynomial over F; names are base_name, base_name1, ...
Extension cf_extend_algebraic(const ConstField& F, const Poly& minpoly, const std::string& base_name);

// square root inside a field level when it exists
std::optional<Elem> sqrt_in_field(const Level& K, const Elem& e);

std::string fresh_name(const std::vector<std::string>& taken, const std::string& stem);

}  // namespace finterm
