// Recursive exact field tower: Q, then transcendental levels k(x) stored as
// reduced fractions of univariate polynomials, and algebraic levels k[x]/(m).
#pragma once

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace finterm {

using Z = mpz_class;
using Q = mpq_class;

struct Elem;
using Poly = std::vector<Elem>;  // low degree first, no trailing zeros

struct Elem {
  Q q;     // base level value
  Poly n;  // numerator (transcendental) or representative (algebraic)
  Poly d;  // monic denominator (transcendental only)
};

enum class LevelKind { Base, Trans, Alg };
enum class GenKind { Constant, Var, Exp, Log, Root };

struct Level;
using LevelPtr = std::shared_ptr<const Level>;

struct Level {
  LevelKind kind = LevelKind::Base;
  GenKind gen = GenKind::Constant;
  std::string name = "Q";
  LevelPtr base;
  int depth = 0;
  bool constant = true;  // derivation vanishes on this level
  Poly minpoly;          // Alg: monic over base
  Elem arg;              // Exp/Log/Root argument, element of base
  Elem dgen;             // derivative of the generator, element of this level
  Poly dgen_poly;        // same as a polynomial over base (Trans levels)
  std::vector<long long> hom;  // generator images in F_p for the fixed primes, -1 if none
};

struct DivisionByZero : std::domain_error {
  DivisionByZero() : std::domain_error("division by zero") {}
};

struct FactorUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// level construction
LevelPtr base_level();
LevelPtr make_trans(LevelPtr base, std::string name);
LevelPtr make_alg(LevelPtr base, std::string name, Poly minpoly);
// Differential generators. `arg` lives in `base`.
LevelPtr make_var(LevelPtr base, std::string name);
LevelPtr make_exp(LevelPtr base, std::string name, Elem arg);
LevelPtr make_log(LevelPtr base, std::string name, Elem arg);
LevelPtr make_root(LevelPtr base, std::string name, Elem arg);
// x^n = arg, assumed irreducible
LevelPtr make_radical(LevelPtr base, std::string name, Elem arg, int n);

const Level* ancestor(const Level& L, int depth);
bool is_ancestor(const Level& anc, const Level& L);

// element arithmetic
Elem zero(const Level& L);
Elem one(const Level& L);
Elem from_q(const Level& L, const Q& q);
Elem from_int(const Level& L, long v);
Elem gen(const Level& L);
Elem lift(const Level& L, const Level& src, const Elem& e);
Elem lift1(const Level& L, const Elem& e);  // from L.base

bool is_zero(const Level& L, const Elem& e);
bool is_one(const Level& L, const Elem& e);
bool eq(const Level& L, const Elem& a, const Elem& b);
int cmp(const Level& L, const Elem& a, const Elem& b);

Elem add(const Level& L, const Elem& a, const Elem& b);
Elem sub(const Level& L, const Elem& a, const Elem& b);
Elem neg(const Level& L, const Elem& a);
Elem mul(const Level& L, const Elem& a, const Elem& b);
Elem scale(const Level& L, const Elem& a, const Q& c);
Elem inv(const Level& L, const Elem& a);
Elem div(const Level& L, const Elem& a, const Elem& b);
Elem pow(const Level& L, const Elem& a, long k);

// true and set `out` if e lies in the base of L
bool lower1(const Level& L, const Elem& e, Elem& out);
// smallest ancestor level containing e, and e expressed there
const Level* min_level(const Level& L, const Elem& e, Elem& out);
// true iff e is a rational number, with value in q
bool as_rational(const Level& L, const Elem& e, Q& q);
// true iff e lies in the constant part of the tower
bool is_constant_elem(const Level& L, const Elem& e);
// the topmost constant ancestor (Q when none)
const Level* const_top(const Level& L);

// derivation
Elem derive(const Level& L, const Elem& e);

// polynomials over a level
int deg(const Poly& p);
void trim(const Level& K, Poly& p);
Poly pconst(const Level& K, const Elem& c);
Poly pmono(const Level& K, const Elem& c, int k);
Poly px(const Level& K);
const Elem& lc(const Poly& p);
bool peq(const Level& K, const Poly& a, const Poly& b);
Poly padd(const Level& K, const Poly& a, const Poly& b);
Poly psub(const Level& K, const Poly& a, const Poly& b);
Poly pneg(const Level& K, const Poly& a);
Poly pmul(const Level& K, const Poly& a, const Poly& b);
Poly pscale(const Level& K, const Poly& a, const Elem& c);
Poly pscaleq(const Level& K, const Poly& a, const Q& c);
Poly pshift(const Level& K, const Poly& a, int k);  // multiply by x^k
void pdivmod(const Level& K, const Poly& a, const Poly& b, Poly& q, Poly& r);
Poly pquo(const Level& K, const Poly& a, const Poly& b);
Poly prem(const Level& K, const Poly& a, const Poly& b);
Poly pexact(const Level& K, const Poly& a, const Poly& b);  // throws if inexact
Poly pmonic(const Level& K, const Poly& a);
Poly pgcd(const Level& K, const Poly& a, const Poly& b);
// g = s a + t b with g monic gcd
Poly pxgcd(const Level& K, const Poly& a, const Poly& b, Poly& s, Poly& t);
// solve s a + t b = c with deg s < deg b; requires gcd(a,b) | c
void pdiophant(const Level& K, const Poly& a, const Poly& b, const Poly& c, Poly& s, Poly& t);
Poly ppow(const Level& K, const Poly& a, long k);
Poly pdiff(const Level& K, const Poly& a);  // formal d/dx
Elem peval(const Level& K, const Poly& a, const Elem& x);
Poly pcompose(const Level& K, const Poly& a, const Poly& b);  // a(b(x))
Elem presultant(const Level& K, const Poly& a, const Poly& b);
Elem pdisc(const Level& K, const Poly& a);
// squarefree decomposition: a = lc * prod f_i^i, factors monic
std::vector<std::pair<Poly, int>> psqf(const Level& K, const Poly& a);
bool psquarefree(const Level& K, const Poly& a);
Poly pmap(const Level& K, const Poly& a, const std::function<Elem(const Elem&)>& f);

// polynomial derivation D on K[x] where x is the generator of L (L.base == K)
Poly pderive(const Level& L, const Poly& p);
// coefficientwise derivation (kappa_D)
Poly pderive_coeffs(const Level& K, const Poly& p);

// fraction helpers for a Trans level L over K
Elem frac(const Level& L, Poly n, Poly d);
const Poly& num(const Elem& e);
const Poly& den(const Elem& e);
// element of an Alg level from representative
Elem alg_elem(const Level& L, Poly rep);

// printing with level names
std::string to_string(const Level& L, const Elem& e);
std::string poly_string(const Level& K, const Poly& p, const std::string& var);

}  // namespace finterm
