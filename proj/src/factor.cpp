#include "finterm/factor.hpp"

#include <algorithm>
#include <cstdint>
#include <random>

namespace finterm {

namespace {

// ------------------------------------------------------------ Z[x] helpers

void ztrim(ZPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

int zdeg(const ZPoly& p) { return static_cast<int>(p.size()) - 1; }

Z zcontent(const ZPoly& p) {
  Z g = 0;
  for (auto& c : p) g = gcd(g, c);
  return g;
}

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, Z(0));
  for (size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]))
      for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  ztrim(r);
  return r;
}

// exact division over Z; false when b does not divide a
bool zdivexact(const ZPoly& a, const ZPoly& b, ZPoly& q) {
  ZPoly r = a;
  int db = zdeg(b);
  if (zdeg(r) < db) return r.empty() ? (q.clear(), true) : false;
  q.assign(zdeg(r) - db + 1, Z(0));
  while (!r.empty() && zdeg(r) >= db) {
    int k = zdeg(r) - db;
    if (!mpz_divisible_p(r.back().get_mpz_t(), b.back().get_mpz_t())) return false;
    Z c = r.back() / b.back();
    q[k] = c;
    for (int i = 0; i <= db; ++i) r[i + k] -= c * b[i];
    ztrim(r);
  }
  if (!r.empty()) return false;
  ztrim(q);
  return true;
}

ZPoly zmod(const ZPoly& a, const Z& m) {
  ZPoly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    mpz_fdiv_r(r[i].get_mpz_t(), a[i].get_mpz_t(), m.get_mpz_t());
  }
  ztrim(r);
  return r;
}

ZPoly zsym(const ZPoly& a, const Z& m) {
  ZPoly r = zmod(a, m);
  Z half = m / 2;
  for (auto& c : r)
    if (c > half) c -= m;
  ztrim(r);
  return r;
}

// polynomials modulo m (monic division)
ZPoly zmm_mul(const ZPoly& a, const ZPoly& b, const Z& m) { return zmod(zmul(a, b), m); }

ZPoly zmm_add(const ZPoly& a, const ZPoly& b, const Z& m) {
  ZPoly r(std::max(a.size(), b.size()), Z(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return zmod(r, m);
}

ZPoly zmm_sub(const ZPoly& a, const ZPoly& b, const Z& m) {
  ZPoly r(std::max(a.size(), b.size()), Z(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return zmod(r, m);
}

// divide by monic b modulo m
void zmm_divmod(const ZPoly& a, const ZPoly& b, const Z& m, ZPoly& q, ZPoly& r) {
  r = zmod(a, m);
  q.clear();
  int db = zdeg(b);
  if (zdeg(r) < db) return;
  q.assign(zdeg(r) - db + 1, Z(0));
  while (!r.empty() && zdeg(r) >= db) {
    int k = zdeg(r) - db;
    Z c = r.back();
    q[k] = c;
    for (int i = 0; i <= db; ++i) {
      r[i + k] -= c * b[i];
      mpz_fdiv_r(r[i + k].get_mpz_t(), r[i + k].get_mpz_t(), m.get_mpz_t());
    }
    ztrim(r);
  }
  q = zmod(q, m);
}

// ------------------------------------------------------------ GF(p)[x]

using u64 = std::uint64_t;
using MPoly = std::vector<u64>;

u64 mulmod(u64 a, u64 b, u64 p) { return (a * b) % p; }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

void mtrim(MPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int mdeg(const MPoly& a) { return static_cast<int>(a.size()) - 1; }

MPoly mreduce(const ZPoly& a, u64 p) {
  MPoly r(a.size());
  Z pp = static_cast<unsigned long>(p);
  for (size_t i = 0; i < a.size(); ++i) {
    Z t;
    mpz_fdiv_r(t.get_mpz_t(), a[i].get_mpz_t(), pp.get_mpz_t());
    r[i] = t.get_ui();
  }
  mtrim(r);
  return r;
}

MPoly mmul(const MPoly& a, const MPoly& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  MPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  mtrim(r);
  return r;
}

MPoly msub(const MPoly& a, const MPoly& b, u64 p) {
  MPoly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + p - b[i]) % p;
  mtrim(r);
  return r;
}

void mdivmod(const MPoly& a, const MPoly& b, u64 p, MPoly& q, MPoly& r) {
  r = a;
  q.clear();
  int db = mdeg(b);
  if (mdeg(r) < db) return;
  q.assign(mdeg(r) - db + 1, 0);
  u64 il = invmod(b.back(), p);
  while (!r.empty() && mdeg(r) >= db) {
    int k = mdeg(r) - db;
    u64 c = mulmod(r.back(), il, p);
    q[k] = c;
    for (int i = 0; i <= db; ++i) r[i + k] = (r[i + k] + p - mulmod(c, b[i], p)) % p;
    mtrim(r);
  }
  mtrim(q);
}

MPoly mrem(const MPoly& a, const MPoly& b, u64 p) {
  MPoly q, r;
  mdivmod(a, b, p, q, r);
  return r;
}

MPoly mmonic(const MPoly& a, u64 p) {
  if (a.empty()) return a;
  u64 il = invmod(a.back(), p);
  MPoly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = mulmod(a[i], il, p);
  return r;
}

MPoly mgcd(MPoly a, MPoly b, u64 p) {
  while (!b.empty()) {
    MPoly r = mrem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return mmonic(a, p);
}

// s a + t b = g
MPoly mxgcd(const MPoly& a, const MPoly& b, u64 p, MPoly& s, MPoly& t) {
  MPoly r0 = a, r1 = b, s0{1}, s1, t0, t1{1};
  while (!r1.empty()) {
    MPoly q, r;
    mdivmod(r0, r1, p, q, r);
    r0 = r1;
    r1 = r;
    MPoly ns = msub(s0, mmul(q, s1, p), p);
    MPoly nt = msub(t0, mmul(q, t1, p), p);
    s0 = s1;
    s1 = ns;
    t0 = t1;
    t1 = nt;
  }
  u64 il = invmod(r0.back(), p);
  for (auto& c : s0) c = mulmod(c, il, p);
  for (auto& c : t0) c = mulmod(c, il, p);
  s = s0;
  t = t0;
  return mmonic(r0, p);
}

MPoly mpowmod(MPoly base, const Z& e, const MPoly& f, u64 p) {
  MPoly r{1};
  base = mrem(base, f, p);
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    r = mrem(mmul(r, r, p), f, p);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = mrem(mmul(r, base, p), f, p);
  }
  return r;
}

MPoly mderiv(const MPoly& a, u64 p) {
  if (a.size() <= 1) return {};
  MPoly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = mulmod(a[i], i % p, p);
  mtrim(r);
  return r;
}

// distinct degree factorization of a monic squarefree f
std::vector<std::pair<MPoly, int>> ddf(MPoly f, u64 p) {
  std::vector<std::pair<MPoly, int>> out;
  MPoly h{0, 1};
  MPoly x{0, 1};
  Z pz = static_cast<unsigned long>(p);
  int i = 1;
  while (mdeg(f) >= 2 * i) {
    h = mpowmod(h, pz, f, p);
    MPoly g = mgcd(f, msub(h, x, p), p);
    if (mdeg(g) > 0) {
      out.push_back({g, i});
      MPoly q, r;
      mdivmod(f, g, p, q, r);
      f = q;
      h = mrem(h, f, p);
    }
    ++i;
  }
  if (mdeg(f) > 0) out.push_back({f, mdeg(f)});
  return out;
}

void edf(const MPoly& g, int d, u64 p, std::mt19937_64& rng, std::vector<MPoly>& out) {
  if (mdeg(g) == d) {
    out.push_back(g);
    return;
  }
  Z pd;
  mpz_ui_pow_ui(pd.get_mpz_t(), p, d);
  Z e = (pd - 1) / 2;
  for (;;) {
    MPoly a(mdeg(g));
    for (auto& c : a) c = rng() % p;
    mtrim(a);
    if (mdeg(a) < 1) continue;
    MPoly b = mpowmod(a, e, g, p);
    b = msub(b, MPoly{1}, p);
    MPoly h = mgcd(g, b, p);
    if (mdeg(h) > 0 && mdeg(h) < mdeg(g)) {
      MPoly q, r;
      mdivmod(g, h, p, q, r);
      edf(h, d, p, rng, out);
      edf(mmonic(q, p), d, p, rng, out);
      return;
    }
  }
}

bool is_prime_u(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

ZPoly mtoz(const MPoly& a) {
  ZPoly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = static_cast<unsigned long>(a[i]);
  return r;
}

// inverse of a modulo m (a unit)
Z zinvmod(const Z& a, const Z& m) {
  Z r;
  mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// lift f = g h (mod m, h monic, s g + t h = 1) to modulus m^2
void hensel_step(const ZPoly& f, ZPoly& g, ZPoly& h, ZPoly& s, ZPoly& t, Z& m) {
  Z m2 = m * m;
  ZPoly e = zmm_sub(f, zmul(g, h), m2);
  ZPoly q, r;
  zmm_divmod(zmm_mul(s, e, m2), h, m2, q, r);
  ZPoly g2 = zmm_add(g, zmm_add(zmm_mul(t, e, m2), zmm_mul(q, g, m2), m2), m2);
  ZPoly h2 = zmm_add(h, r, m2);
  ZPoly b = zmm_sub(zmm_add(zmm_mul(s, g2, m2), zmm_mul(t, h2, m2), m2), ZPoly{Z(1)}, m2);
  ZPoly c, d;
  zmm_divmod(zmm_mul(s, b, m2), h2, m2, c, d);
  ZPoly s2 = zmm_sub(s, d, m2);
  ZPoly t2 = zmm_sub(t, zmm_add(zmm_mul(t, b, m2), zmm_mul(c, g2, m2), m2), m2);
  g = g2;
  h = h2;
  s = s2;
  t = t2;
  m = m2;
}

// lift monic factors of monic f mod p up to modulus M = p^(2^k)
void multi_lift(const ZPoly& f, const std::vector<MPoly>& fac, u64 p, const Z& M,
                std::vector<ZPoly>& out) {
  if (fac.size() == 1) {
    out.push_back(zmod(f, M));
    return;
  }
  size_t half = fac.size() / 2;
  MPoly g{1}, h{1};
  for (size_t i = 0; i < half; ++i) g = mmul(g, fac[i], p);
  for (size_t i = half; i < fac.size(); ++i) h = mmul(h, fac[i], p);
  MPoly sm, tm;
  mxgcd(g, h, p, sm, tm);
  ZPoly G = mtoz(g), H = mtoz(h), S = mtoz(sm), T = mtoz(tm);
  Z m = static_cast<unsigned long>(p);
  while (m < M) hensel_step(f, G, H, S, T, m);
  std::vector<MPoly> left(fac.begin(), fac.begin() + half), right(fac.begin() + half, fac.end());
  multi_lift(G, left, p, M, out);
  multi_lift(H, right, p, M, out);
}

void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

// ------------------------------------------------------------ Zassenhaus

std::vector<ZPoly> zassenhaus(const ZPoly& f0) {
  ZPoly f = f0;
  ztrim(f);
  int n = zdeg(f);
  if (n <= 1) return {f};
  Z lcf = f.back();
  // choose a prime with few modular factors
  u64 best_p = 0;
  std::vector<MPoly> best_fac;
  std::mt19937_64 rng(12345);
  int tried = 0;
  for (u64 p = 3; tried < 6 && p < 100000; p += 2) {
    if (!is_prime_u(p)) continue;
    Z pz = static_cast<unsigned long>(p);
    if (mpz_divisible_p(lcf.get_mpz_t(), pz.get_mpz_t())) continue;
    MPoly fm = mreduce(f, p);
    if (mdeg(fm) != n) continue;
    fm = mmonic(fm, p);
    if (mdeg(mgcd(fm, mderiv(fm, p), p)) > 0) continue;
    ++tried;
    auto dd = ddf(fm, p);
    size_t count = 0;
    for (auto& [g, d] : dd) count += mdeg(g) / d;
    if (best_p == 0 || count < best_fac.size()) {
      std::vector<MPoly> fac;
      for (auto& [g, d] : dd) edf(mmonic(g, p), d, p, rng, fac);
      best_p = p;
      best_fac = fac;
    }
    if (best_fac.size() == 1) break;
  }
  if (best_fac.size() <= 1) return {f};
  u64 p = best_p;
  // coefficient bound for factors, times lc
  Z norm2 = 0;
  for (auto& c : f) norm2 += c * c;
  Z nrm = sqrt(norm2) + 1;
  Z B = nrm * abs(lcf);
  mpz_mul_2exp(B.get_mpz_t(), B.get_mpz_t(), n + 1);
  Z M = static_cast<unsigned long>(p);
  while (M <= 2 * B) M = M * M;
  // monic version of f mod M
  Z il = zinvmod(lcf, M);
  ZPoly fmonic(f.size());
  for (size_t i = 0; i < f.size(); ++i) fmonic[i] = f[i] * il;
  fmonic = zmod(fmonic, M);
  std::vector<ZPoly> lifted;
  multi_lift(fmonic, best_fac, p, M, lifted);

  std::vector<ZPoly> result;
  ZPoly F = f;
  std::vector<ZPoly> rem = lifted;
  int s = 1;
  while (2 * s <= static_cast<int>(rem.size())) {
    bool found = false;
    std::vector<std::vector<int>> subs;
    std::vector<int> cur;
    combinations(static_cast<int>(rem.size()), s, 0, cur, subs);
    for (auto& S : subs) {
      ZPoly g{F.back()};
      for (int i : S) g = zmm_mul(g, rem[i], M);
      g = zsym(g, M);
      Z c = zcontent(g);
      if (sgn(c) == 0) continue;
      for (auto& x : g) x /= c;
      ZPoly q;
      if (zdivexact(F, g, q)) {
        if (g.back() < 0)
          for (auto& x : g) x = -x;
        result.push_back(g);
        F = q;
        std::vector<ZPoly> nr;
        for (int i = 0; i < static_cast<int>(rem.size()); ++i)
          if (std::find(S.begin(), S.end(), i) == S.end()) nr.push_back(rem[i]);
        rem = nr;
        found = true;
        break;
      }
    }
    if (!found) ++s;
  }
  if (zdeg(F) > 0) {
    Z c = zcontent(F);
    for (auto& x : F) x /= c;
    if (F.back() < 0)
      for (auto& x : F) x = -x;
    result.push_back(F);
  }
  return result;
}

ZPoly to_primitive_z(const Poly& p) {
  Z l = 1;
  for (auto& c : p) l = lcm(l, c.q.get_den());
  ZPoly r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[i] = p[i].q.get_num() * (l / p[i].q.get_den());
  Z g = zcontent(r);
  if (sgn(g) != 0)
    for (auto& c : r) c /= g;
  if (!r.empty() && r.back() < 0)
    for (auto& c : r) c = -c;
  return r;
}

Poly from_z(const ZPoly& p) {
  Poly r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[i].q = p[i];
  return r;
}

// ------------------------------------------------------------ generic

namespace {

std::vector<Poly> factor_sqf_q(const Poly& p) {
  const Level& B = *base_level();
  ZPoly z = to_primitive_z(p);
  std::vector<Poly> out;
  for (auto& g : zassenhaus(z)) out.push_back(pmonic(B, from_z(g)));
  return out;
}

Poly interpolate(const Level& K, const std::vector<Q>& xs, std::vector<Elem> ys) {
  // Newton divided differences
  size_t n = xs.size();
  for (size_t j = 1; j < n; ++j)
    for (size_t i = n - 1; i >= j; --i) {
      ys[i] = scale(K, sub(K, ys[i], ys[i - 1]), Q(1) / (xs[i] - xs[i - j]));
      if (i == j) break;
    }
  Poly r;
  for (size_t i = n; i-- > 0;) {
    // r = r * (x - xs[i]) + ys[i]
    Poly t = pmul(K, r, Poly{from_q(K, -xs[i]), one(K)});
    r = padd(K, t, pconst(K, ys[i]));
  }
  return r;
}

bool coeffs_below(const Level& K, const Poly& p, Poly& out) {
  out.clear();
  for (auto& c : p) {
    Elem l;
    if (!lower1(K, c, l)) return false;
    out.push_back(l);
  }
  return true;
}

Poly lift_poly(const Level& K, const Poly& p) {
  Poly r;
  for (auto& c : p) r.push_back(lift1(K, c));
  return r;
}

std::vector<Poly> factor_sqf(const Level& K, const Poly& p);

std::vector<Poly> factor_sqf_alg(const Level& L, const Poly& f) {
  const Level& K = *L.base;
  Elem alpha = gen(L);
  for (int trial = 0; trial < 40; ++trial) {
    long s = (trial % 2 == 0) ? trial / 2 : -(trial + 1) / 2;
    // g(x) = f(x - s alpha)
    Poly shift{neg(L, scale(L, alpha, Q(s))), one(L)};
    Poly g = s == 0 ? f : pcompose(L, f, shift);
    Poly N = norm_down(L, g);
    if (!psquarefree(K, N)) continue;
    std::vector<Poly> out;
    auto nf = factor_sqf(K, N);
    if (nf.size() == 1) return {f};
    Poly back{scale(L, alpha, Q(s)), one(L)};
    for (auto& h : nf) {
      Poly hl = lift_poly(L, h);
      Poly gg = pgcd(L, g, hl);
      if (s != 0) gg = pcompose(L, gg, back);
      out.push_back(pmonic(L, gg));
    }
    return out;
  }
  throw FactorUnsupported("no squarefree norm found");
}

std::vector<Poly> factor_sqf(const Level& K, const Poly& p) {
  if (deg(p) <= 1) return {pmonic(K, p)};
  switch (K.kind) {
    case LevelKind::Base:
      return factor_sqf_q(p);
    case LevelKind::Alg:
      if (!K.constant) throw FactorUnsupported("factorization over a non-constant algebraic level");
      return factor_sqf_alg(K, pmonic(K, p));
    case LevelKind::Trans: {
      Poly low;
      if (!coeffs_below(K, pmonic(K, p), low))
        throw FactorUnsupported("factorization over a transcendental level");
      std::vector<Poly> out;
      for (auto& h : factor_sqf(*K.base, low)) out.push_back(lift_poly(K, h));
      return out;
    }
  }
  return {p};
}

}  // namespace

Poly norm_down(const Level& L, const Poly& p) {
  const Level& K = *L.base;
  int D = deg(L.minpoly) * deg(p);
  std::vector<Q> xs;
  std::vector<Elem> ys;
  for (int j = 0; j <= D; ++j) {
    Q x(j);
    // G(x_j, y) as polynomial in y over K
    Poly G;
    Q xp = 1;
    for (size_t i = 0; i < p.size(); ++i) {
      G = padd(K, G, pscaleq(K, p[i].n, xp));
      xp *= x;
    }
    xs.push_back(x);
    ys.push_back(presultant(K, L.minpoly, G));
  }
  Poly r = interpolate(K, xs, ys);
  trim(K, r);
  return r;
}

bool can_factor(const Level& K) {
  switch (K.kind) {
    case LevelKind::Base:
      return true;
    case LevelKind::Alg:
      return K.constant && can_factor(*K.base);
    case LevelKind::Trans:
      return false;
  }
  return false;
}

std::vector<Poly> factor_squarefree(const Level& K, const Poly& p) { return factor_sqf(K, p); }

Factorization factor(const Level& K, const Poly& p) {
  Factorization F;
  if (p.empty()) throw std::invalid_argument("factor of zero polynomial");
  F.unit = lc(p);
  for (auto& [g, m] : psqf(K, p))
    for (auto& h : factor_sqf(K, g)) F.factors.push_back({h, m});
  return F;
}

std::vector<Elem> roots(const Level& K, const Poly& p) {
  std::vector<Elem> out;
  if (deg(p) < 1) return out;
  for (auto& [g, m] : psqf(K, p))
    for (auto& h : factor_sqf(K, g))
      if (deg(h) == 1) out.push_back(neg(K, h[0]));
  return out;
}

bool is_irreducible(const Level& K, const Poly& p) {
  if (deg(p) < 1) return false;
  if (!psquarefree(K, p)) return false;
  return factor_sqf(K, p).size() == 1;
}

}  // namespace finterm
