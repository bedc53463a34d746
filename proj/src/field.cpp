#include "finterm/field.hpp"

#include <sstream>

namespace finterm {

namespace {

using u64 = unsigned long long;
using MPoly = std::vector<u64>;
constexpr u64 kPrimes[] = {2013265921ULL, 1811939329ULL, 469762049ULL};
constexpr int kNumPrimes = 3;

u64 powm(u64 a, u64 e, u64 p) {
  u64 r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = r * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return r;
}
u64 invm(u64 a, u64 p) { return powm(a, p - 2, p); }

void mtrim(MPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

MPoly mrem(MPoly a, const MPoly& b, u64 p) {
  u64 li = invm(b.back(), p);
  while (a.size() >= b.size()) {
    u64 c = a.back() * li % p;
    size_t off = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = (a[off + i] + (p - c) * b[i]) % p;
    a.pop_back();
    mtrim(a);
  }
  return a;
}

MPoly mmul(const MPoly& a, const MPoly& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  MPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  mtrim(r);
  return r;
}

MPoly mgcd(MPoly a, MPoly b, u64 p) {
  while (!b.empty()) {
    MPoly r = mrem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// base^e mod f
MPoly mpowmod(MPoly base, u64 e, const MPoly& f, u64 p) {
  MPoly r{1};
  base = mrem(base, f, p);
  while (e) {
    if (e & 1) r = mrem(mmul(r, base, p), f, p);
    base = mrem(mmul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

// some root of f in F_p, or -1
long long mroot(MPoly f, u64 p) {
  mtrim(f);
  if (f.size() < 2) return -1;
  MPoly h = mpowmod(MPoly{0, 1}, p, f, p);
  h.resize(std::max<size_t>(h.size(), 2), 0);
  h[1] = (h[1] + p - 1) % p;
  mtrim(h);
  MPoly g = mgcd(f, h, p);
  if (g.size() < 2) return -1;
  for (u64 a = 1; g.size() > 2 && a < 200; ++a) {
    MPoly t = mpowmod(MPoly{a, 1}, (p - 1) / 2, g, p);
    if (t.empty()) continue;
    t[0] = (t[0] + p - 1) % p;
    mtrim(t);
    MPoly s = mgcd(g, t, p);
    if (s.size() >= 2 && s.size() < g.size()) g = s;
  }
  if (g.size() != 2) return -1;
  return static_cast<long long>((p - g[0] * invm(g[1], p) % p) % p);
}

u64 mix(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool img(const Level& L, const Elem& e, int k, u64& out);

bool pimg(const Level& K, const Poly& a, int k, MPoly& out) {
  out.resize(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    if (!img(K, a[i], k, out[i])) return false;
  return true;
}

u64 horner(const MPoly& a, u64 x, u64 p) {
  u64 r = 0;
  for (size_t i = a.size(); i-- > 0;) r = (r * x + a[i]) % p;
  return r;
}

bool img(const Level& L, const Elem& e, int k, u64& out) {
  u64 p = kPrimes[k];
  if (L.kind == LevelKind::Base) {
    u64 d = mpz_fdiv_ui(e.q.get_den_mpz_t(), p);
    if (d == 0) return false;
    out = mpz_fdiv_ui(e.q.get_num_mpz_t(), p) * invm(d, p) % p;
    return true;
  }
  long long x = L.hom[k];
  if (x < 0) return false;
  MPoly n;
  if (!pimg(*L.base, e.n, k, n)) return false;
  u64 nv = horner(n, x, p);
  if (L.kind == LevelKind::Alg) {
    out = nv;
    return true;
  }
  MPoly d;
  if (!pimg(*L.base, e.d, k, d)) return false;
  u64 dv = horner(d, x, p);
  if (dv == 0) return false;
  out = nv * invm(dv, p) % p;
  return true;
}

void set_hom(Level& L) {
  L.hom.assign(kNumPrimes, -1);
  for (int k = 0; k < kNumPrimes; ++k) {
    u64 p = kPrimes[k];
    if (L.base->kind != LevelKind::Base && L.base->hom[k] < 0) continue;
    if (L.kind == LevelKind::Trans) {
      u64 h = std::hash<std::string>{}(L.name);
      L.hom[k] = static_cast<long long>(mix(h ^ mix(L.depth * 131 + k)) % p);
    } else {
      MPoly m;
      if (!pimg(*L.base, L.minpoly, k, m)) continue;
      L.hom[k] = mroot(m, p);
    }
  }
}

// degree of gcd(a, b) modulo some prime; an upper bound for the true degree
int modular_gcd_degree(const Level& K, const Poly& a, const Poly& b) {
  for (int k = 0; k < kNumPrimes; ++k) {
    if (K.kind != LevelKind::Base && K.hom[k] < 0) continue;
    MPoly ma, mb;
    if (!pimg(K, a, k, ma) || !pimg(K, b, k, mb)) continue;
    if (ma.empty() || mb.empty() || ma.back() == 0 || mb.back() == 0) continue;
    return static_cast<int>(mgcd(ma, mb, kPrimes[k]).size()) - 1;
  }
  return -1;
}

std::shared_ptr<Level> make_level(LevelPtr base, LevelKind kind, GenKind g, std::string name) {
  auto L = std::make_shared<Level>();
  L->kind = kind;
  L->gen = g;
  L->name = std::move(name);
  L->base = base;
  L->depth = base->depth + 1;
  return L;
}

}  // namespace

LevelPtr base_level() {
  static LevelPtr B = std::make_shared<Level>();
  return B;
}

LevelPtr make_trans(LevelPtr base, std::string name) {
  auto L = make_level(base, LevelKind::Trans, GenKind::Constant, std::move(name));
  L->constant = base->constant;
  L->dgen = zero(*L);
  set_hom(*L);
  return L;
}

LevelPtr make_alg(LevelPtr base, std::string name, Poly minpoly) {
  auto L = make_level(base, LevelKind::Alg, GenKind::Constant, std::move(name));
  trim(*base, minpoly);
  if (deg(minpoly) < 1) throw std::invalid_argument("minimal polynomial must be nonconstant");
  L->minpoly = pmonic(*base, minpoly);
  L->constant = base->constant;
  for (auto& c : L->minpoly)
    if (!is_constant_elem(*base, c)) L->constant = false;
  set_hom(*L);
  L->dgen = zero(*L);
  return L;
}

LevelPtr make_var(LevelPtr base, std::string name) {
  auto L = make_level(base, LevelKind::Trans, GenKind::Var, std::move(name));
  L->constant = false;
  set_hom(*L);
  L->dgen_poly = pconst(*base, one(*base));
  L->dgen = one(*L);
  return L;
}

LevelPtr make_exp(LevelPtr base, std::string name, Elem arg) {
  auto L = make_level(base, LevelKind::Trans, GenKind::Exp, std::move(name));
  L->constant = false;
  set_hom(*L);
  Elem da = derive(*base, arg);
  L->arg = std::move(arg);
  L->dgen_poly = pmono(*base, da, 1);
  L->dgen = frac(*L, L->dgen_poly, pconst(*base, one(*base)));
  return L;
}

LevelPtr make_log(LevelPtr base, std::string name, Elem arg) {
  auto L = make_level(base, LevelKind::Trans, GenKind::Log, std::move(name));
  L->constant = false;
  set_hom(*L);
  Elem dl = div(*base, derive(*base, arg), arg);
  L->arg = std::move(arg);
  L->dgen_poly = pconst(*base, dl);
  L->dgen = lift1(*L, dl);
  return L;
}

LevelPtr make_radical(LevelPtr base, std::string name, Elem arg, int n) {
  auto L = make_level(base, LevelKind::Alg, GenKind::Root, std::move(name));
  const Level& K = *base;
  Poly m(n + 1, zero(K));
  m[0] = neg(K, arg);
  m[n] = one(K);
  L->minpoly = m;
  set_hom(*L);
  L->constant = is_constant_elem(K, arg);
  Elem da = derive(K, arg);
  Elem c = div(K, da, scale(K, arg, Q(n)));
  L->arg = std::move(arg);
  L->dgen = alg_elem(*L, Poly{zero(K), c});
  return L;
}

LevelPtr make_root(LevelPtr base, std::string name, Elem arg) { return make_radical(std::move(base), std::move(name), std::move(arg), 2); }

const Level* ancestor(const Level& L, int depth) {
  const Level* p = &L;
  while (p && p->depth > depth) p = p->base.get();
  return p;
}

bool is_ancestor(const Level& anc, const Level& L) { return ancestor(L, anc.depth) == &anc; }

// ---------------------------------------------------------------- elements

Elem zero(const Level& L) {
  Elem e;
  if (L.kind == LevelKind::Trans) e.d.push_back(one(*L.base));
  return e;
}

Elem one(const Level& L) {
  Elem e;
  switch (L.kind) {
    case LevelKind::Base:
      e.q = 1;
      break;
    case LevelKind::Trans:
      e.n.push_back(one(*L.base));
      e.d.push_back(one(*L.base));
      break;
    case LevelKind::Alg:
      e.n.push_back(one(*L.base));
      break;
  }
  return e;
}

Elem from_q(const Level& L, const Q& q) {
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = q;
    e.q.canonicalize();
    return e;
  }
  if (q == 0) return zero(L);
  return lift1(L, from_q(*L.base, q));
}

Elem from_int(const Level& L, long v) { return from_q(L, Q(v)); }

Elem gen(const Level& L) {
  if (L.kind == LevelKind::Base) throw std::logic_error("base level has no generator");
  const Level& K = *L.base;
  Poly x{zero(K), one(K)};
  if (L.kind == LevelKind::Trans) return Elem{Q(), x, pconst(K, one(K))};
  if (deg(L.minpoly) == 1) return alg_elem(L, x);
  return Elem{Q(), x, {}};
}

Elem lift1(const Level& L, const Elem& c) {
  const Level& K = *L.base;
  Elem e;
  if (L.kind == LevelKind::Trans) {
    if (!is_zero(K, c)) e.n.push_back(c);
    e.d.push_back(one(K));
  } else {
    if (!is_zero(K, c)) e.n.push_back(c);
  }
  return e;
}

Elem lift(const Level& L, const Level& src, const Elem& e) {
  if (&L == &src) return e;
  if (L.depth <= src.depth) throw std::logic_error("lift: source is not below target");
  return lift1(L, lift(*L.base, src, e));
}

bool is_zero(const Level& L, const Elem& e) {
  if (L.kind == LevelKind::Base) return sgn(e.q) == 0;
  return e.n.empty();
}

bool is_one(const Level& L, const Elem& e) {
  switch (L.kind) {
    case LevelKind::Base:
      return e.q == 1;
    case LevelKind::Trans:
      return e.n.size() == 1 && e.d.size() == 1 && is_one(*L.base, e.n[0]);
    case LevelKind::Alg:
      return e.n.size() == 1 && is_one(*L.base, e.n[0]);
  }
  return false;
}

bool peq(const Level& K, const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!eq(K, a[i], b[i])) return false;
  return true;
}

bool eq(const Level& L, const Elem& a, const Elem& b) {
  switch (L.kind) {
    case LevelKind::Base:
      return a.q == b.q;
    case LevelKind::Trans:
      return peq(*L.base, a.n, b.n) && peq(*L.base, a.d, b.d);
    case LevelKind::Alg:
      return peq(*L.base, a.n, b.n);
  }
  return false;
}

static int pcmp(const Level& K, const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    int c = cmp(K, a[i], b[i]);
    if (c) return c;
  }
  return 0;
}

int cmp(const Level& L, const Elem& a, const Elem& b) {
  switch (L.kind) {
    case LevelKind::Base: {
      int c = ::cmp(a.q, b.q);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case LevelKind::Trans: {
      int c = pcmp(*L.base, a.d, b.d);
      return c ? c : pcmp(*L.base, a.n, b.n);
    }
    case LevelKind::Alg:
      return pcmp(*L.base, a.n, b.n);
  }
  return 0;
}

Elem frac(const Level& L, Poly n, Poly d) {
  const Level& K = *L.base;
  trim(K, n);
  trim(K, d);
  if (d.empty()) throw DivisionByZero();
  if (n.empty()) return zero(L);
  if (deg(d) > 0) {
    Poly g = pgcd(K, n, d);
    if (deg(g) > 0) {
      n = pexact(K, n, g);
      d = pexact(K, d, g);
    }
  }
  if (!is_one(K, lc(d))) {
    Elem ci = inv(K, lc(d));
    n = pscale(K, n, ci);
    d = pscale(K, d, ci);
  }
  return Elem{Q(), std::move(n), std::move(d)};
}

const Poly& num(const Elem& e) { return e.n; }
const Poly& den(const Elem& e) { return e.d; }

Elem alg_elem(const Level& L, Poly rep) {
  const Level& K = *L.base;
  trim(K, rep);
  if (deg(rep) >= deg(L.minpoly)) rep = prem(K, rep, L.minpoly);
  return Elem{Q(), std::move(rep), {}};
}

Elem add(const Level& L, const Elem& a, const Elem& b) {
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = a.q + b.q;
    return e;
  }
  const Level& K = *L.base;
  if (L.kind == LevelKind::Alg) return Elem{Q(), padd(K, a.n, b.n), {}};
  if (a.n.empty()) return b;
  if (b.n.empty()) return a;
  if (peq(K, a.d, b.d)) {
    Poly n = padd(K, a.n, b.n);
    if (deg(a.d) == 0) {
      if (n.empty()) return zero(L);
      return Elem{Q(), std::move(n), a.d};
    }
    return frac(L, std::move(n), a.d);
  }
  Poly g = pgcd(K, a.d, b.d);
  if (deg(g) == 0) {
    Poly n = padd(K, pmul(K, a.n, b.d), pmul(K, b.n, a.d));
    if (n.empty()) return zero(L);
    return Elem{Q(), std::move(n), pmul(K, a.d, b.d)};
  }
  Poly ad = pexact(K, a.d, g), bd = pexact(K, b.d, g);
  Poly n = padd(K, pmul(K, a.n, bd), pmul(K, b.n, ad));
  if (n.empty()) return zero(L);
  Poly d = pmul(K, a.d, bd);
  Poly h = pgcd(K, n, g);
  if (deg(h) > 0) {
    n = pexact(K, n, h);
    d = pexact(K, d, h);
  }
  return Elem{Q(), std::move(n), std::move(d)};
}

Elem neg(const Level& L, const Elem& a) {
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = -a.q;
    return e;
  }
  Elem e = a;
  for (auto& c : e.n) c = neg(*L.base, c);
  return e;
}

Elem sub(const Level& L, const Elem& a, const Elem& b) { return add(L, a, neg(L, b)); }

Elem mul(const Level& L, const Elem& a, const Elem& b) {
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = a.q * b.q;
    return e;
  }
  const Level& K = *L.base;
  if (L.kind == LevelKind::Alg) {
    if (a.n.empty() || b.n.empty()) return zero(L);
    return alg_elem(L, pmul(K, a.n, b.n));
  }
  if (a.n.empty() || b.n.empty()) return zero(L);
  if (deg(a.d) == 0 && deg(b.d) == 0) return Elem{Q(), pmul(K, a.n, b.n), a.d};
  Poly an = a.n, ad = a.d, bn = b.n, bd = b.d;
  if (deg(bd) > 0) {
    Poly g1 = pgcd(K, an, bd);
    if (deg(g1) > 0) {
      an = pexact(K, an, g1);
      bd = pexact(K, bd, g1);
    }
  }
  if (deg(ad) > 0) {
    Poly g2 = pgcd(K, bn, ad);
    if (deg(g2) > 0) {
      bn = pexact(K, bn, g2);
      ad = pexact(K, ad, g2);
    }
  }
  return Elem{Q(), pmul(K, an, bn), pmul(K, ad, bd)};
}

Elem scale(const Level& L, const Elem& a, const Q& c) {
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = a.q * c;
    return e;
  }
  if (c == 0) return zero(L);
  Elem e = a;
  for (auto& x : e.n) x = scale(*L.base, x, c);
  return e;
}

Elem inv(const Level& L, const Elem& a) {
  if (is_zero(L, a)) throw DivisionByZero();
  if (L.kind == LevelKind::Base) {
    Elem e;
    e.q = 1 / a.q;
    return e;
  }
  const Level& K = *L.base;
  if (L.kind == LevelKind::Trans) {
    Elem ci = inv(K, lc(a.n));
    return Elem{Q(), pscale(K, a.d, ci), pscale(K, a.n, ci)};
  }
  Poly s, t;
  Poly g = pxgcd(K, a.n, L.minpoly, s, t);
  if (deg(g) != 0) throw DivisionByZero();
  return alg_elem(L, s);
}

Elem div(const Level& L, const Elem& a, const Elem& b) { return mul(L, a, inv(L, b)); }

Elem pow(const Level& L, const Elem& a, long k) {
  if (k < 0) return pow(L, inv(L, a), -k);
  Elem r = one(L), b = a;
  while (k) {
    if (k & 1) r = mul(L, r, b);
    k >>= 1;
    if (k) b = mul(L, b, b);
  }
  return r;
}

bool lower1(const Level& L, const Elem& e, Elem& out) {
  if (L.kind == LevelKind::Base) return false;
  const Level& K = *L.base;
  if (L.kind == LevelKind::Trans && deg(e.d) != 0) return false;
  if (deg(e.n) > 0) return false;
  out = e.n.empty() ? zero(K) : e.n[0];
  return true;
}

const Level* min_level(const Level& L, const Elem& e, Elem& out) {
  const Level* cur = &L;
  out = e;
  Elem low;
  while (cur->kind != LevelKind::Base && lower1(*cur, out, low)) {
    out = std::move(low);
    cur = cur->base.get();
  }
  return cur;
}

bool as_rational(const Level& L, const Elem& e, Q& q) {
  Elem low;
  const Level* m = min_level(L, e, low);
  if (m->kind != LevelKind::Base) return false;
  q = low.q;
  return true;
}

bool is_constant_elem(const Level& L, const Elem& e) {
  if (L.constant) return true;
  Elem low;
  const Level* m = min_level(L, e, low);
  return m->constant;
}

const Level* const_top(const Level& L) {
  const Level* p = &L;
  while (!p->constant) p = p->base.get();
  return p;
}

// ---------------------------------------------------------------- derivation

Poly pderive_coeffs(const Level& K, const Poly& p) {
  Poly r;
  r.reserve(p.size());
  for (auto& c : p) r.push_back(derive(K, c));
  trim(K, r);
  return r;
}

Poly pderive(const Level& L, const Poly& p) {
  const Level& K = *L.base;
  Poly r = pderive_coeffs(K, p);
  if (L.constant) return r;
  return padd(K, r, pmul(K, pdiff(K, p), L.dgen_poly));
}

Elem derive(const Level& L, const Elem& e) {
  if (L.constant) return zero(L);
  const Level& K = *L.base;
  if (L.kind == LevelKind::Trans) {
    if (e.n.empty()) return zero(L);
    Poly dn = pderive(L, e.n);
    if (deg(e.d) == 0) {
      if (dn.empty()) return zero(L);
      return Elem{Q(), std::move(dn), e.d};
    }
    Poly dd = pderive(L, e.d);
    Poly g = pgcd(K, e.d, dd);
    Poly h = pexact(K, e.d, g);
    Poly n = psub(K, pmul(K, dn, h), pmul(K, e.n, pexact(K, dd, g)));
    return frac(L, std::move(n), pmul(K, e.d, h));
  }
  // algebraic, non-constant
  Elem p1 = alg_elem(L, pderive_coeffs(K, e.n));
  Elem p2 = mul(L, alg_elem(L, pdiff(K, e.n)), L.dgen);
  return add(L, p1, p2);
}

// ---------------------------------------------------------------- polynomials

int deg(const Poly& p) { return static_cast<int>(p.size()) - 1; }

void trim(const Level& K, Poly& p) {
  while (!p.empty() && is_zero(K, p.back())) p.pop_back();
}

Poly pconst(const Level& K, const Elem& c) {
  if (is_zero(K, c)) return {};
  return {c};
}

Poly pmono(const Level& K, const Elem& c, int k) {
  if (is_zero(K, c)) return {};
  Poly p(k + 1, zero(K));
  p[k] = c;
  return p;
}

Poly px(const Level& K) { return {zero(K), one(K)}; }

const Elem& lc(const Poly& p) {
  if (p.empty()) throw std::logic_error("leading coefficient of zero polynomial");
  return p.back();
}

Poly padd(const Level& K, const Poly& a, const Poly& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const Poly& big = a.size() >= b.size() ? a : b;
  const Poly& small = a.size() >= b.size() ? b : a;
  Poly r = big;
  for (size_t i = 0; i < small.size(); ++i) r[i] = add(K, r[i], small[i]);
  trim(K, r);
  return r;
}

Poly pneg(const Level& K, const Poly& a) {
  Poly r;
  r.reserve(a.size());
  for (auto& c : a) r.push_back(neg(K, c));
  return r;
}

Poly psub(const Level& K, const Poly& a, const Poly& b) { return padd(K, a, pneg(K, b)); }

Poly pmul(const Level& K, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, zero(K));
  for (size_t i = 0; i < a.size(); ++i) {
    if (is_zero(K, a[i])) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (is_zero(K, b[j])) continue;
      r[i + j] = add(K, r[i + j], mul(K, a[i], b[j]));
    }
  }
  trim(K, r);
  return r;
}

Poly pscale(const Level& K, const Poly& a, const Elem& c) {
  if (is_zero(K, c)) return {};
  if (is_one(K, c)) return a;
  Poly r;
  r.reserve(a.size());
  for (auto& x : a) r.push_back(mul(K, x, c));
  trim(K, r);
  return r;
}

Poly pscaleq(const Level& K, const Poly& a, const Q& c) {
  if (c == 0) return {};
  Poly r;
  r.reserve(a.size());
  for (auto& x : a) r.push_back(scale(K, x, c));
  return r;
}

Poly pshift(const Level& K, const Poly& a, int k) {
  if (a.empty() || k == 0) return a;
  Poly r(k, zero(K));
  r.insert(r.end(), a.begin(), a.end());
  return r;
}

void pdivmod(const Level& K, const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.empty()) throw DivisionByZero();
  r = a;
  q.clear();
  int db = deg(b);
  if (deg(r) < db) return;
  q.assign(deg(r) - db + 1, zero(K));
  Elem ilc = inv(K, lc(b));
  bool monic = is_one(K, lc(b));
  while (!r.empty() && deg(r) >= db) {
    int k = deg(r) - db;
    Elem c = monic ? r.back() : mul(K, r.back(), ilc);
    q[k] = c;
    for (int i = 0; i < db; ++i) {
      if (is_zero(K, b[i])) continue;
      r[i + k] = sub(K, r[i + k], mul(K, c, b[i]));
    }
    r.pop_back();
    trim(K, r);
  }
  trim(K, q);
}

Poly pquo(const Level& K, const Poly& a, const Poly& b) {
  Poly q, r;
  pdivmod(K, a, b, q, r);
  return q;
}

Poly prem(const Level& K, const Poly& a, const Poly& b) {
  Poly q, r;
  pdivmod(K, a, b, q, r);
  return r;
}

Poly pexact(const Level& K, const Poly& a, const Poly& b) {
  Poly q, r;
  pdivmod(K, a, b, q, r);
  if (!r.empty()) throw std::logic_error("inexact polynomial division");
  return q;
}

Poly pmonic(const Level& K, const Poly& a) {
  if (a.empty() || is_one(K, lc(a))) return a;
  return pscale(K, a, inv(K, lc(a)));
}

Poly pgcd(const Level& K, const Poly& a0, const Poly& b0) {
  if (a0.empty()) return pmonic(K, b0);
  if (b0.empty()) return pmonic(K, a0);
  if (deg(a0) == 0 || deg(b0) == 0) return {one(K)};
  int md = modular_gcd_degree(K, a0, b0);
  if (md == 0) return {one(K)};
  if (md >= 0 && md == std::min(deg(a0), deg(b0))) {
    const Poly& s = deg(a0) <= deg(b0) ? a0 : b0;
    const Poly& t = deg(a0) <= deg(b0) ? b0 : a0;
    if (prem(K, t, s).empty()) return pmonic(K, s);
  }
  Poly a = pmonic(K, a0), b = pmonic(K, b0);
  if (deg(a) < deg(b)) std::swap(a, b);
  while (!b.empty()) {
    Poly r = prem(K, a, b);
    a = std::move(b);
    b = pmonic(K, r);
    if (!b.empty() && deg(b) == 0) return {one(K)};
  }
  return a;
}

Poly pxgcd(const Level& K, const Poly& a, const Poly& b, Poly& s, Poly& t) {
  Poly r0 = a, r1 = b;
  Poly s0{one(K)}, s1, t0, t1{one(K)};
  while (!r1.empty()) {
    Poly q, r;
    pdivmod(K, r0, r1, q, r);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly ns = psub(K, s0, pmul(K, q, s1));
    Poly nt = psub(K, t0, pmul(K, q, t1));
    s0 = std::move(s1);
    s1 = std::move(ns);
    t0 = std::move(t1);
    t1 = std::move(nt);
  }
  if (r0.empty()) {
    s.clear();
    t.clear();
    return r0;
  }
  Elem c = inv(K, lc(r0));
  s = pscale(K, s0, c);
  t = pscale(K, t0, c);
  return pscale(K, r0, c);
}

void pdiophant(const Level& K, const Poly& a, const Poly& b, const Poly& c, Poly& s, Poly& t) {
  Poly s0, t0;
  Poly g = pxgcd(K, a, b, s0, t0);
  Poly q, r;
  pdivmod(K, c, g, q, r);
  if (!r.empty()) throw std::logic_error("diophantine equation has no solution");
  s = pmul(K, s0, q);
  if (!b.empty() && deg(b) > 0) s = prem(K, s, b);
  t = pexact(K, psub(K, c, pmul(K, s, a)), b);
}

Poly ppow(const Level& K, const Poly& a, long k) {
  Poly r{one(K)}, b = a;
  while (k > 0) {
    if (k & 1) r = pmul(K, r, b);
    k >>= 1;
    if (k) b = pmul(K, b, b);
  }
  return r;
}

Poly pdiff(const Level& K, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1, zero(K));
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = scale(K, a[i], Q(static_cast<long>(i)));
  trim(K, r);
  return r;
}

Elem peval(const Level& K, const Poly& a, const Elem& x) {
  Elem r = zero(K);
  for (size_t i = a.size(); i-- > 0;) r = add(K, mul(K, r, x), a[i]);
  return r;
}

Poly pcompose(const Level& K, const Poly& a, const Poly& b) {
  Poly r;
  for (size_t i = a.size(); i-- > 0;) r = padd(K, pmul(K, r, b), pconst(K, a[i]));
  return r;
}

Elem presultant(const Level& K, const Poly& a0, const Poly& b0) {
  if (a0.empty() || b0.empty()) return zero(K);
  Poly a = a0, b = b0;
  Elem res = one(K);
  while (deg(b) > 0) {
    Poly r = prem(K, a, b);
    if (r.empty()) return zero(K);
    int da = deg(a), db = deg(b), dr = deg(r);
    Elem f = pow(K, lc(b), da - dr);
    if ((da & 1) && (db & 1)) f = neg(K, f);
    res = mul(K, res, f);
    a = std::move(b);
    b = std::move(r);
  }
  return mul(K, res, pow(K, lc(b), deg(a)));
}

Elem pdisc(const Level& K, const Poly& a) {
  int n = deg(a);
  Elem r = div(K, presultant(K, a, pdiff(K, a)), lc(a));
  if ((n * (n - 1) / 2) & 1) r = neg(K, r);
  return r;
}

std::vector<std::pair<Poly, int>> psqf(const Level& K, const Poly& a0) {
  std::vector<std::pair<Poly, int>> out;
  if (deg(a0) < 1) return out;
  Poly a = pmonic(K, a0);
  Poly da = pdiff(K, a);
  Poly c = pgcd(K, a, da);
  Poly w = pexact(K, a, c);
  Poly y = pexact(K, da, c);
  Poly z = psub(K, y, pdiff(K, w));
  int i = 1;
  while (deg(w) > 0) {
    Poly g = pgcd(K, w, z);
    if (deg(g) > 0) out.push_back({g, i});
    w = pexact(K, w, g);
    y = pexact(K, z, g);
    z = psub(K, y, pdiff(K, w));
    ++i;
  }
  return out;
}

bool psquarefree(const Level& K, const Poly& a) {
  if (deg(a) < 2) return true;
  return deg(pgcd(K, a, pdiff(K, a))) == 0;
}

Poly pmap(const Level& K, const Poly& a, const std::function<Elem(const Elem&)>& f) {
  Poly r;
  r.reserve(a.size());
  for (auto& c : a) r.push_back(f(c));
  trim(K, r);
  return r;
}

// ---------------------------------------------------------------- printing

std::string poly_string(const Level& K, const Poly& p, const std::string& var) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = p.size(); i-- > 0;) {
    if (is_zero(K, p[i])) continue;
    if (!first) os << " + ";
    first = false;
    std::string c = to_string(K, p[i]);
    if (i == 0) {
      os << c;
      continue;
    }
    if (!is_one(K, p[i])) os << "(" << c << ")*";
    os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

std::string to_string(const Level& L, const Elem& e) {
  switch (L.kind) {
    case LevelKind::Base:
      return e.q.get_str();
    case LevelKind::Trans: {
      std::string n = poly_string(*L.base, e.n, L.name);
      if (deg(e.d) == 0) return n;
      return "(" + n + ")/(" + poly_string(*L.base, e.d, L.name) + ")";
    }
    case LevelKind::Alg:
      return poly_string(*L.base, e.n, L.name);
  }
  return "?";
}

}  // namespace finterm
