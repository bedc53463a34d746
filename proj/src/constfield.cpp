#include "finterm/constfield.hpp"

#include <algorithm>
#include <set>

#include "finterm/factor.hpp"

namespace finterm {

std::vector<LevelPtr> ConstField::chain() const {
  std::vector<LevelPtr> out;
  for (LevelPtr p = top; p; p = p->base) out.push_back(p);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::string> ConstField::symbols() const {
  std::vector<std::string> out;
  for (auto& L : chain())
    if (L->kind != LevelKind::Base) out.push_back(L->name);
  return out;
}

LevelPtr ConstField::find(const std::string& name) const {
  for (LevelPtr p = top; p && p->kind != LevelKind::Base; p = p->base)
    if (p->name == name) return p;
  return nullptr;
}

ConstVal ConstField::symbol(const std::string& name) const {
  LevelPtr L = find(name);
  if (!L) throw std::invalid_argument("unknown constant symbol " + name);
  return lift(*top, *L, gen(*L));
}

ConstField ConstField::with_transcendental(const std::string& name) const {
  return ConstField{make_trans(top, name)};
}

ConstField ConstField::with_algebraic(const std::string& name, const Poly& minpoly) const {
  return ConstField{make_alg(top, name, minpoly)};
}

ConstVal cf_arith(const ConstField& F, ArithOp op, const ConstVal& a, const ConstVal& b) {
  const Level& L = F.level();
  switch (op) {
    case ArithOp::Add:
      return add(L, a, b);
    case ArithOp::Sub:
      return sub(L, a, b);
    case ArithOp::Mul:
      return mul(L, a, b);
    case ArithOp::Div:
      return div(L, a, b);
  }
  return a;
}

namespace {

// does e (at level L) depend on a transcendental generator?
bool involves_trans(const Level& L, const Elem& e) {
  Elem low;
  const Level* m = min_level(L, e, low);
  if (m->kind == LevelKind::Base) return false;
  if (m->kind == LevelKind::Trans) return true;
  for (auto& c : m->minpoly)
    if (involves_trans(*m->base, c)) return true;
  for (auto& c : low.n)
    if (involves_trans(*m->base, c)) return true;
  return false;
}

}  // namespace

Classification cf_classify(const ConstField& F, const ConstVal& a) {
  const Level& L = F.level();
  Q q;
  if (as_rational(L, a, q)) {
    if (q == 0) return {ConstClass::Zero, q};
    if (q.get_den() == 1) return {ConstClass::Integer, q};
    return {ConstClass::NonzeroRational, q};
  }
  if (involves_trans(L, a)) return {ConstClass::TranscendentalInvolving, 0};
  return {ConstClass::AlgebraicIrrational, 0};
}

const char* class_name(ConstClass c) {
  switch (c) {
    case ConstClass::Zero:
      return "zero";
    case ConstClass::Integer:
      return "integer";
    case ConstClass::NonzeroRational:
      return "rational";
    case ConstClass::AlgebraicIrrational:
      return "algebraic-irrational";
    case ConstClass::TranscendentalInvolving:
      return "transcendental";
  }
  return "?";
}

ConstVal Extension::embed(const ConstField& old, const ConstVal& v) const {
  return lift(field.level(), old.level(), v);
}

std::string fresh_name(const std::vector<std::string>& taken, const std::string& stem) {
  std::set<std::string> s(taken.begin(), taken.end());
  if (!s.count(stem)) return stem;
  for (int k = 1;; ++k) {
    std::string c = stem + std::to_string(k);
    if (!s.count(c)) return c;
  }
}

Extension cf_extend_algebraic(const ConstField& F, const Poly& minpoly, const std::string& base_name) {
  const Level& K = F.level();
  if (deg(minpoly) < 1) throw std::invalid_argument("extension polynomial must be nonconstant");
  if (!psquarefree(K, minpoly)) throw NotSquarefree();
  Extension ext;
  ext.field = F;
  std::vector<Poly> pending = factor_squarefree(K, minpoly);
  // each factor gets one root; later factors are refactored over the grown field
  for (auto& g0 : pending) {
    const Level& cur = ext.field.level();
    Poly g;
    for (auto& c : g0) g.push_back(lift(cur, K, c));
    auto parts = factor_squarefree(cur, g);
    Poly h = parts.front();
    for (auto& p : parts)
      if (deg(p) < deg(h)) h = p;
    if (deg(h) == 1) {
      ext.roots.push_back(neg(cur, pmonic(cur, h)[0]));
      continue;
    }
    std::string name = fresh_name(ext.field.symbols(), base_name);
    ConstField nf = ext.field.with_algebraic(name, h);
    for (auto& r : ext.roots) r = lift(nf.level(), cur, r);
    ext.roots.push_back(gen(nf.level()));
    ext.field = nf;
  }
  return ext;
}

namespace {

// K = B(theta), theta^2 + b*theta + c = 0; work with s = 2*theta + b, s^2 = b^2 - 4c
std::optional<Elem> sqrt_quadratic(const Level& K, const Elem& e) {
  const Level& B = *K.base;
  const Elem& b = K.minpoly[1];
  const Elem& c = K.minpoly[0];
  Elem d = sub(B, mul(B, b, b), scale(B, c, Q(4)));
  Elem u = e.n.size() > 0 ? e.n[0] : zero(B);
  Elem v = e.n.size() > 1 ? e.n[1] : zero(B);
  Elem q = scale(B, v, Q(1, 2));
  Elem p = sub(B, u, mul(B, q, b));
  Elem sK = add(K, scale(K, gen(K), Q(2)), lift1(K, b));
  if (is_zero(B, q)) {
    if (auto r = sqrt_in_field(B, p)) return lift1(K, *r);
    if (auto r = sqrt_in_field(B, mul(B, d, p))) return mul(K, lift1(K, div(B, *r, d)), sK);
    return std::nullopt;
  }
  auto n = sqrt_in_field(B, sub(B, mul(B, p, p), mul(B, d, mul(B, q, q))));
  if (!n) return std::nullopt;
  for (int sg : {1, -1}) {
    Elem x2 = scale(B, add(B, p, scale(B, *n, Q(sg))), Q(1, 2));
    if (is_zero(B, x2)) continue;
    if (auto x = sqrt_in_field(B, x2)) {
      Elem y = div(B, q, scale(B, *x, Q(2)));
      return add(K, lift1(K, *x), mul(K, lift1(K, y), sK));
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Elem> sqrt_in_field(const Level& K, const Elem& e) {
  if (is_zero(K, e)) return e;
  switch (K.kind) {
    case LevelKind::Base: {
      Z n = e.q.get_num(), d = e.q.get_den();
      if (n < 0) return std::nullopt;
      if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
      Elem r;
      r.q = Q(sqrt(n), sqrt(d));
      return r;
    }
    case LevelKind::Trans: {
      const Level& B = *K.base;
      Poly nd = pmul(B, e.n, e.d);
      auto s = sqrt_in_field(B, lc(nd));
      if (!s) return std::nullopt;
      Poly root{*s};
      for (auto& [f, m] : psqf(B, nd)) {
        if (m % 2) return std::nullopt;
        root = pmul(B, root, ppow(B, f, m / 2));
      }
      return frac(K, root, e.d);
    }
    case LevelKind::Alg: {
      Elem low;
      if (lower1(K, e, low)) {
        if (auto r = sqrt_in_field(*K.base, low)) return lift1(K, *r);
      }
      if (!can_factor(K)) {
        if (deg(K.minpoly) == 2) return sqrt_quadratic(K, e);
        if (K.constant) throw FactorUnsupported("square root test over this constant field");
        return std::nullopt;
      }
      Poly x2{neg(K, e), zero(K), one(K)};
      auto rs = roots(K, x2);
      if (rs.empty()) return std::nullopt;
      return rs.front();
    }
  }
  return std::nullopt;
}

}  // namespace finterm
