// Surface expression language: trees, parser, printer, differentiation,
// numeric evaluation.
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "finterm/constfield.hpp"
#include "json.hpp"

namespace finterm {

enum class ExprKind { Num, Sym, Var, Add, Mul, Pow, Exp, Log, Inv };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::Num;
  Q num;                  // Num value, Pow exponent
  std::string name;       // Sym, Var, Inv
  std::vector<Expr> args;  // operands; Pow base; Exp/Log/Inv argument
  Expr def;               // Inv: defining F(w)
  std::string def_var;    // Inv: variable of def
};

// raw constructors (no simplification)
Expr e_num(const Q& q);
Expr e_sym(const std::string& s);
Expr e_var(const std::string& v);
Expr e_add_raw(std::vector<Expr> xs);
Expr e_mul_raw(std::vector<Expr> xs);
Expr e_pow_raw(Expr b, const Q& r);
Expr e_exp(Expr a);
Expr e_log(Expr a);
Expr e_inv(const std::string& name, Expr arg, Expr def, const std::string& def_var);

// light simplification: flattening, numeric folding, unit and zero removal
Expr e_add(std::vector<Expr> xs);
Expr e_mul(std::vector<Expr> xs);
Expr e_pow(Expr b, const Q& r);
Expr e_neg(Expr a);
Expr e_sub(Expr a, Expr b);
Expr e_div(Expr a, Expr b);
Expr e_add(Expr a, Expr b);
Expr e_mul(Expr a, Expr b);

bool expr_equal(const Expr& a, const Expr& b);
bool is_num(const Expr& e, const Q& q);
bool contains_inverse(const Expr& e);
bool depends_on(const Expr& e, const std::string& var);
Expr substitute(const Expr& e, const std::string& var, const Expr& by);
// replace Inv nodes named `name` by f(arg)
Expr substitute_inverse(const Expr& e, const std::string& name, const std::function<Expr(const Expr&)>& f);

// parsing
struct ParseDiagnostics {
  size_t position = 0;
  std::string message;
  std::set<std::string> expected;
};

struct ParseError : std::runtime_error {
  enum Kind { Syntax, UnknownSymbol } kind;
  ParseDiagnostics diag;
  ParseError(Kind k, ParseDiagnostics d);
  std::string caret(const std::string& input) const;
};

struct InverseDecl {
  std::string name;  // e.g. W
  Expr def;          // F(w)
  std::string var;   // w
};

struct ParseOptions {
  std::vector<std::string> vars{"z"};
  std::vector<InverseDecl> inverses;
};

Expr parse(const std::string& text, const ConstField& field, const ParseOptions& opt = {});
// "t1,t2; a^2-2; b^2+1"
ConstField parse_constants(const std::string& decl);
// "W=w*exp(w)": the inverse variable is w
InverseDecl parse_inverse_decl(const std::string& decl, const ConstField& field);
// polynomial in `var` over the field, from an expression
Poly expr_to_poly(const Expr& e, const ConstField& field, const std::string& var);
ConstVal expr_to_const(const Expr& e, const ConstField& field);
Expr const_to_expr(const ConstField& F, const ConstVal& c);
Expr level_elem_to_expr(const Level& L, const Elem& e, const std::function<Expr(const Level&)>& gen_expr);

std::string print(const Expr& e);
nlohmann::json to_json(const Expr& e);

struct InverseSymPresent : std::invalid_argument {
  InverseSymPresent() : std::invalid_argument("expression contains an inverse symbol") {}
};
Expr differentiate(const Expr& e, const std::string& var = "z");

// numeric evaluation
using cplx = std::complex<double>;
struct NumEnv {
  std::map<std::string, cplx> values;  // variables and constant symbols
  std::function<cplx(const std::string&, cplx)> inverse;  // numeric inverse functions
};
cplx eval(const Expr& e, const NumEnv& env);
// value and derivative with respect to `var` (forward-mode dual numbers)
std::pair<cplx, cplx> eval_dual(const Expr& e, const NumEnv& env, const std::string& var);

}  // namespace finterm
