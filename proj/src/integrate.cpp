#include "finterm/integrate.hpp"

#include <algorithm>
#include <numeric>

#include "finterm/factor.hpp"

namespace finterm {

const char* stage_name(NonElemStage s) {
  switch (s) {
    case NonElemStage::ResidueNotConstant:
      return "ResidueNotConstant";
    case NonElemStage::RDEUnsolvable:
      return "RDEUnsolvable";
    case NonElemStage::PolynomialPartObstruction:
      return "PolynomialPartObstruction";
    case NonElemStage::SpecialCriterion:
      return "SpecialCriterion";
  }
  return "?";
}

namespace {

struct NeedConstants {
  Poly p;  // monic irreducible over the constants
};

struct NotElem {
  NonElemStage stage;
  std::string detail;
};

struct Int {
  Elem v0;
  std::vector<LogTerm> logs;  // c in the constants, v at the same level as v0
};

struct PLD {
  Z q;  // q alpha = m eta + z'/z
  Z m;
  Elem z;
};

bool is_poly(const Level& L, const Elem& e) { return L.kind != LevelKind::Trans || deg(e.d) == 0; }

int ord_t(const Level& Kl, const Poly& p) {
  int k = 0;
  while (k < static_cast<int>(p.size()) && is_zero(Kl, p[k])) ++k;
  return k;
}

class Risch {
 public:
  explicit Risch(const DiffTower& T) : T_(T), C_(T.field.level()) {}

  // ---------------------------------------------------------------- basics

  const Level& K(const Level& L) const { return *L.base; }

  Elem E(const Level& L, const Poly& p) const { return frac(L, p, Poly{one(K(L))}); }

  Poly P(const Level& L, const Elem& e) const {
    if (!is_poly(L, e)) throw std::logic_error("expected a polynomial in the top monomial");
    return e.n;
  }

  Poly tpow(const Level& L, int k) const { return pmono(K(L), one(K(L)), k); }

  bool is_var(const Level& L) const { return &L == T_.zlevel.get(); }

  bool to_const(const Level& L, const Elem& e, Elem& c) const {
    Elem low;
    const Level* m = min_level(L, e, low);
    if (m->depth > C_.depth) return false;
    c = lift(C_, *m, low);
    return true;
  }

  Elem cup(const Level& L, const Elem& c) const { return lift(L, C_, c); }

  // coefficient of the logarithmic derivative: t'/t for exp, t' for log
  Elem eta_d(const Level& L) const {
    if (L.gen == GenKind::Exp) return L.dgen_poly[1];
    return L.dgen_poly[0];
  }

  Int lift_int(const Level& L, const Level& src, const Int& r) const {
    Int o;
    o.v0 = lift(L, src, r.v0);
    for (auto& lg : r.logs) o.logs.push_back({lg.c, lift(L, src, lg.v)});
    return o;
  }

  // tower generators at or below K usable as logarithms: (u'/u, log u) pairs
  void tower_logs(const Level& Kl, std::vector<Elem>& ws, std::vector<Elem>& es) const {
    for (auto& m : T_.monomials) {
      const Level& M = *m.level;
      if (M.depth > Kl.depth || M.kind != LevelKind::Trans) continue;
      ws.push_back(lift(Kl, M, m.w));
      if (M.gen == GenKind::Log)
        es.push_back(lift(Kl, M, gen(M)));
      else
        es.push_back(lift(Kl, *M.base, M.arg));
    }
  }

  // ---------------------------------------------------------------- constant roots

  std::vector<Elem> const_roots(const Poly& p0) const {
    Poly p = pmonic(C_, p0);
    std::vector<Poly> parts;
    try {
      for (auto& [g, m] : psqf(C_, p)) {
        auto fs = factor_squarefree(C_, g);
        parts.insert(parts.end(), fs.begin(), fs.end());
      }
    } catch (const FactorUnsupported&) {
      parts.clear();
      for (auto& [g, m] : psqf(C_, p)) {
        if (deg(g) == 1) {
          parts.push_back(g);
        } else if (deg(g) == 2) {
          Elem disc = sub(C_, mul(C_, g[1], g[1]), scale(C_, g[0], Q(4)));
          auto s = sqrt_in_field(C_, disc);
          if (!s) throw NeedConstants{g};
          Elem half = from_q(C_, Q(1, 2));
          parts.push_back(Poly{mul(C_, half, sub(C_, g[1], *s)), one(C_)});
          parts.push_back(Poly{mul(C_, half, add(C_, g[1], *s)), one(C_)});
        } else {
          throw Unsupported("cannot factor a residue polynomial over the constants");
        }
      }
    }
    std::vector<Elem> out;
    for (auto& f : parts) {
      if (deg(f) > 1) throw NeedConstants{pmonic(C_, f)};
      Poly m = pmonic(C_, f);
      out.push_back(neg(C_, m[0]));
    }
    return out;
  }

  // positive integer roots of r over K
  std::vector<long> int_roots(const Level& Kl, Poly r) const {
    std::vector<long> out;
    if (deg(r) < 1) return out;
    r = pmonic(Kl, r);
    while (deg(r) >= 1) {
      Poly k = pderive_coeffs(Kl, r);
      if (k.empty()) break;
      r = pgcd(Kl, r, k);
    }
    if (deg(r) < 1) return out;
    Poly rc;
    for (auto& c : r) {
      Elem cc;
      if (!to_const(Kl, c, cc)) return out;
      rc.push_back(cc);
    }
    auto vs = flatten(C_, rc);
    size_t dim = vs.empty() ? 0 : vs[0].size();
    for (size_t j = 0; j < dim; ++j) {
      Poly pq;
      for (auto& v : vs) pq.push_back(from_q(*base_level(), v[j]));
      trim(*base_level(), pq);
      if (deg(pq) < 1) continue;
      for (auto& x : roots(*base_level(), pq)) {
        if (x.q.get_den() != 1 || x.q <= 0 || !x.q.get_num().fits_slong_p()) continue;
        if (is_zero(C_, peval(C_, rc, from_q(C_, x.q)))) out.push_back(x.q.get_num().get_si());
      }
      break;
    }
    return out;
  }

  // R(y) = res_t(d, a - y b) through interpolation at y = 0..deg d
  Poly resultant_y(const Level& Kl, const Poly& d, const Poly& a, const Poly& b) const {
    int n = deg(d);
    std::vector<Elem> ys, vs;
    for (int k = 0; k <= n; ++k) {
      ys.push_back(from_int(Kl, k));
      vs.push_back(presultant(Kl, d, psub(Kl, a, pscaleq(Kl, b, Q(k)))));
    }
    // Newton divided differences
    std::vector<Elem> c = vs;
    for (int j = 1; j <= n; ++j)
      for (int i = n; i >= j; --i) c[i] = scale(Kl, sub(Kl, c[i], c[i - 1]), Q(1, j));
    Poly r{c[n]};
    for (int i = n - 1; i >= 0; --i) {
      r = pmul(Kl, r, Poly{from_int(Kl, -i), one(Kl)});
      r = padd(Kl, r, Poly{c[i]});
    }
    trim(Kl, r);
    return r;
  }

  // ---------------------------------------------------------------- Hermite

  struct Herm {
    Elem g;
    Poly A, D;  // simple part A/D
    Poly q;     // polynomial part
    Poly B;     // B / t^k
    int k = 0;
  };

  void split(const Level& L, const Poly& d, int& k, Poly& dn) const {
    k = 0;
    dn = d;
    if (L.gen == GenKind::Exp) {
      k = ord_t(K(L), d);
      dn.erase(dn.begin(), dn.begin() + k);
    }
  }

  Herm hermite(const Level& L, const Elem& f) const {
    const Level& Kl = K(L);
    Herm H;
    H.g = zero(L);
    Poly dn;
    split(L, f.d, H.k, dn);
    Poly r;
    pdivmod(Kl, f.n, f.d, H.q, r);
    Poly A = r;
    if (H.k > 0) {
      Poly s, t;
      pdiophant(Kl, tpow(L, H.k), dn, r, s, t);
      A = s;
      H.B = t;
    }
    if (deg(dn) > 0 && !A.empty()) {
      for (auto& [V, i] : psqf(Kl, dn)) {
        if (i < 2) continue;
        Poly U = pexact(Kl, dn, ppow(Kl, V, i));
        Poly DV = pderive(L, V);
        for (int j = i - 1; j >= 1; --j) {
          Poly s, t;
          pdiophant(Kl, pscaleq(Kl, pmul(Kl, U, DV), Q(-j)), V, A, s, t);
          H.g = add(L, H.g, frac(L, s, ppow(Kl, V, j)));
          A = psub(Kl, t, pmul(Kl, U, pderive(L, s)));
        }
        dn = pmul(Kl, U, V);
      }
    }
    if (A.empty() || deg(dn) < 1) {
      H.q = padd(Kl, H.q, A.empty() ? Poly{} : pscale(Kl, A, inv(Kl, lc(dn))));
      return H;
    }
    Poly q2, r2;
    pdivmod(Kl, A, dn, q2, r2);
    H.q = padd(Kl, H.q, q2);
    if (!r2.empty()) {
      Elem h = frac(L, r2, dn);
      H.A = h.n;
      H.D = h.d;
    }
    return H;
  }

  // ---------------------------------------------------------------- Rothstein-Trager

  RTResult rt(const Level& L, const Poly& A, const Poly& D) const {
    const Level& Kl = K(L);
    RTResult R;
    Poly DD = pderive(L, D);
    Poly res = resultant_y(Kl, D, A, DD);
    res = pmonic(Kl, res);
    Poly rc;
    for (auto& c : res) {
      Elem cc;
      if (!to_const(Kl, c, cc)) {
        R.constant_residues = false;
        return R;
      }
      rc.push_back(cc);
    }
    Elem h = frac(L, A, D);
    Elem rest = h;
    for (auto& c : const_roots(rc)) {
      Poly v = pgcd(Kl, D, psub(Kl, A, pscale(Kl, DD, cup(Kl, c))));
      if (deg(v) < 1) continue;
      Elem ve = E(L, v);
      R.logs.push_back({c, ve});
      rest = sub(L, rest, mul(L, cup(L, c), div(L, derive(L, ve), ve)));
    }
    Elem low;
    if (!lower1(L, rest, low)) throw std::logic_error("residue reduction left a nonpolynomial remainder");
    R.rest = low;
    return R;
  }

  // ---------------------------------------------------------------- integration

  Int integ(const Level& L, const Elem& f) const {
    if (is_zero(L, f)) return {zero(L), {}};
    if (!is_var(L)) {
      Elem low;
      if (lower1(L, f, low)) return lift_int(L, K(L), integ(K(L), low));
    }
    if (L.kind == LevelKind::Alg) throw Unsupported("AlgebraicMonomial");
    if (is_var(L)) return integ_rational(L, f);
    return integ_mono(L, f);
  }

  Poly poly_integral(const Level& Kl, const Poly& p) const {
    Poly r{zero(Kl)};
    for (size_t i = 0; i < p.size(); ++i) r.push_back(scale(Kl, p[i], Q(1, static_cast<long>(i + 1))));
    trim(Kl, r);
    return r;
  }

  Int integ_rational(const Level& L, const Elem& f) const {
    Herm H = hermite(L, f);
    Int out;
    out.v0 = add(L, H.g, E(L, poly_integral(K(L), H.q)));
    if (!H.D.empty()) {
      RTResult R = rt(L, H.A, H.D);
      if (R.extension) throw NeedConstants{*R.extension};
      for (auto& lg : R.logs) out.logs.push_back(lg);
      if (!is_zero(K(L), R.rest)) throw std::logic_error("rational residue reduction is incomplete");
    }
    return out;
  }

  Int integ_mono(const Level& L, const Elem& f) const {
    const Level& Kl = K(L);
    Herm H = hermite(L, f);
    Int out;
    out.v0 = H.g;
    Elem rest = zero(Kl);
    if (!H.D.empty()) {
      RTResult R = rt(L, H.A, H.D);
      if (!R.constant_residues) throw NotElem{NonElemStage::ResidueNotConstant, "residues of the simple part are not constant"};
      for (auto& lg : R.logs) out.logs.push_back(lg);
      rest = R.rest;
    }
    Poly q = padd(Kl, H.q, Poly{rest});
    trim(Kl, q);
    Int pp;
    if (L.gen == GenKind::Log) {
      pp = primitive_poly(L, q);
    } else {
      pp = exp_laurent(L, q, H.B, H.k);
    }
    out.v0 = add(L, out.v0, pp.v0);
    for (auto& lg : pp.logs) out.logs.push_back(lg);
    return out;
  }

  Int exp_laurent(const Level& L, const Poly& q, const Poly& B, int k) const {
    const Level& Kl = K(L);
    Elem eta = eta_d(L);
    Int out;
    out.v0 = zero(L);
    Elem p0 = zero(Kl);
    auto term = [&](int i, const Elem& c) {
      if (is_zero(Kl, c)) return;
      if (i == 0) {
        p0 = add(Kl, p0, c);
        return;
      }
      auto y = rde(Kl, scale(Kl, eta, Q(i)), c);
      if (!y) throw NotElem{NonElemStage::RDEUnsolvable, "no solution of the Risch differential equation for power " + std::to_string(i)};
      Elem yt = lift1(L, *y);
      Elem ti = i > 0 ? E(L, tpow(L, i)) : frac(L, Poly{one(Kl)}, tpow(L, -i));
      out.v0 = add(L, out.v0, mul(L, yt, ti));
    };
    for (size_t i = 0; i < q.size(); ++i) term(static_cast<int>(i), q[i]);
    for (size_t j = 0; j < B.size(); ++j) term(static_cast<int>(j) - k, B[j]);
    Int r0 = lift_int(L, Kl, integ(Kl, p0));
    out.v0 = add(L, out.v0, r0.v0);
    out.logs = r0.logs;
    return out;
  }

  Int primitive_poly(const Level& L, Poly p) const {
    const Level& Kl = K(L);
    Elem w = eta_d(L);
    Int out;
    out.v0 = zero(L);
    while (deg(p) >= 1) {
      int m = deg(p);
      auto lim = limited_integrate(Kl, lc(p), w);
      if (!lim) throw NotElem{NonElemStage::PolynomialPartObstruction, "coefficient of degree " + std::to_string(m) + " has no integral of the required form"};
      Poly q0 = pmono(Kl, lim->first, m);
      q0 = padd(Kl, q0, pmono(Kl, scale(Kl, cup(Kl, lim->second), Q(1, m + 1)), m + 1));
      out.v0 = add(L, out.v0, E(L, q0));
      p = psub(Kl, p, pderive(L, q0));
      if (deg(p) >= m) throw std::logic_error("primitive polynomial reduction did not lower the degree");
    }
    Int r0 = lift_int(L, Kl, integ(Kl, p.empty() ? zero(Kl) : p[0]));
    out.v0 = add(L, out.v0, r0.v0);
    out.logs = r0.logs;
    return out;
  }

  // ---------------------------------------------------------------- log terms

  // rewrite log terms whose logarithms lie in the tower (or in span of `extra`)
  std::vector<Elem> absorb(const Level& Kl, Int& r, const std::vector<Elem>& extra) const {
    std::vector<Elem> ws, es;
    tower_logs(Kl, ws, es);
    size_t nt = ws.size();
    for (auto& x : extra) ws.push_back(x);
    std::vector<Elem> ec(extra.size(), zero(C_));
    auto apply = [&](const Elem& c, const std::vector<Q>& sol) {
      for (size_t k = 0; k < sol.size(); ++k) {
        if (sgn(sol[k]) == 0) continue;
        if (k < nt)
          r.v0 = add(Kl, r.v0, mul(Kl, cup(Kl, scale(C_, c, sol[k])), es[k]));
        else
          ec[k - nt] = add(C_, ec[k - nt], scale(C_, c, sol[k]));
      }
    };
    std::vector<LogTerm> keep;
    for (auto& lg : r.logs) {
      Elem cc;
      if (to_const(Kl, lg.v, cc)) continue;
      Elem ld = div(Kl, derive(Kl, lg.v), lg.v);
      if (!ws.empty()) {
        if (auto sol = span_solve(Kl, ld, ws)) {
          apply(lg.c, *sol);
          continue;
        }
      }
      keep.push_back(lg);
    }
    r.logs = keep;
    if (r.logs.size() > 1 && !ws.empty()) {
      // combinations over a Q-basis of the coefficients
      std::vector<Elem> cs;
      for (auto& lg : r.logs) cs.push_back(lg.c);
      auto vs = flatten(C_, cs);
      std::vector<size_t> basis;
      std::vector<std::vector<Q>> cols;
      for (size_t j = 0; j < vs.size(); ++j) {
        std::vector<std::vector<Q>> A(vs[j].size());
        for (size_t row = 0; row < vs[j].size(); ++row)
          for (auto b : basis) A[row].push_back(vs[b][row]);
        if (basis.empty() || !solve_rational(A, vs[j])) basis.push_back(j);
      }
      std::vector<std::vector<Q>> coef(vs.size());
      for (size_t j = 0; j < vs.size(); ++j) {
        std::vector<std::vector<Q>> A(vs[j].size());
        for (size_t row = 0; row < vs[j].size(); ++row)
          for (auto b : basis) A[row].push_back(vs[b][row]);
        coef[j] = *solve_rational(A, vs[j]);
      }
      for (size_t bi = 0; bi < basis.size(); ++bi) {
        Elem target = zero(Kl);
        for (size_t j = 0; j < r.logs.size(); ++j)
          if (sgn(coef[j][bi]) != 0)
            target = add(Kl, target, scale(Kl, div(Kl, derive(Kl, r.logs[j].v), r.logs[j].v), coef[j][bi]));
        auto sol = span_solve(Kl, target, ws);
        if (!sol) continue;
        Elem om = cs[basis[bi]];
        apply(om, *sol);
        for (size_t j = 0; j < r.logs.size(); ++j)
          r.logs[j].c = sub(C_, r.logs[j].c, scale(C_, om, coef[j][bi]));
      }
      std::vector<LogTerm> k2;
      for (auto& lg : r.logs)
        if (!is_zero(C_, lg.c)) k2.push_back(lg);
      r.logs = k2;
    }
    return ec;
  }

  // a = b' + c w with b in K and c constant
  std::optional<std::pair<Elem, Elem>> limited_integrate(const Level& Kl, const Elem& a, const Elem& w) const {
    Int r;
    try {
      r = integ(Kl, a);
    } catch (const NotElem&) {
      return std::nullopt;
    } catch (const NeedConstants&) {
      return std::nullopt;
    }
    auto ec = absorb(Kl, r, {w});
    if (!r.logs.empty()) return std::nullopt;
    return std::make_pair(r.v0, ec[0]);
  }

  // q alpha = m eta + z'/z with z in K (eta may be absent)
  std::optional<PLD> log_deriv(const Level& Kl, const Elem& alpha, const std::optional<Elem>& eta) const {
    if (is_zero(Kl, alpha)) return PLD{1, 0, one(Kl)};
    Int r;
    try {
      r = integ(Kl, alpha);
    } catch (const NotElem&) {
      return std::nullopt;
    } catch (const NeedConstants&) {
      return std::nullopt;
    }
    std::vector<Elem> ws, es;
    tower_logs(Kl, ws, es);
    std::vector<Elem> ys;
    for (auto& m : T_.monomials) {
      const Level& M = *m.level;
      if (M.depth > Kl.depth || M.kind != LevelKind::Trans) continue;
      if (M.gen == GenKind::Log)
        ys.push_back(lift(Kl, *M.base, M.arg));
      else
        ys.push_back(lift(Kl, M, gen(M)));
    }
    std::vector<Elem> span = ws;
    if (eta) span.insert(span.begin(), *eta);
    std::vector<Q> sol(span.size());
    Elem dv = derive(Kl, r.v0);
    if (!is_zero(Kl, dv)) {
      if (span.empty()) return std::nullopt;
      auto s = span_solve(Kl, dv, span);
      if (!s) return std::nullopt;
      sol = *s;
    }
    std::vector<Q> cs;
    for (auto& lg : r.logs) {
      Q c;
      if (!as_rational(C_, lg.c, c)) return std::nullopt;
      cs.push_back(c);
    }
    Z q = 1;
    for (auto& x : sol) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), x.get_den_mpz_t());
    for (auto& x : cs) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), x.get_den_mpz_t());
    PLD out;
    out.q = q;
    size_t off = eta ? 1 : 0;
    out.m = eta ? Z(Q(sol[0] * q).get_num()) : Z(0);
    Elem z = one(Kl);
    auto mulpow = [&](const Elem& y, const Q& e) {
      Q k = e * q;
      long kk = k.get_num().get_si();
      if (kk >= 0)
        z = mul(Kl, z, pow(Kl, y, kk));
      else
        z = div(Kl, z, pow(Kl, y, -kk));
    };
    for (size_t k = 0; k < ys.size(); ++k)
      if (sgn(sol[k + off]) != 0) mulpow(ys[k], sol[k + off]);
    for (size_t j = 0; j < cs.size(); ++j) mulpow(r.logs[j].v, cs[j]);
    out.z = z;
    return out;
  }

  // ---------------------------------------------------------------- Risch differential equation

 public:
  std::optional<Elem> rde(const Level& L, const Elem& f, const Elem& g) const {
    if (is_zero(L, g)) return zero(L);
    if (L.constant) {
      if (is_zero(L, f)) return std::nullopt;
      return div(L, g, f);
    }
    if (L.kind == LevelKind::Alg) {
      Elem fl, gl;
      if (lower1(L, f, fl) && lower1(L, g, gl)) {
        auto y = rde(K(L), fl, gl);
        if (!y) return std::nullopt;
        return lift1(L, *y);
      }
      throw Unsupported("differential equation over an algebraic monomial");
    }
    std::optional<Elem> y;
    if (is_zero(L, f)) {
      y = deriv_in_field(L, g);
    } else {
      y = rde_trans(L, f, g);
    }
    if (y) {
      Elem chk = add(L, derive(L, *y), mul(L, f, *y));
      if (!eq(L, chk, g)) throw std::logic_error("Risch differential equation solution does not verify");
    }
    return y;
  }

 private:
  // y in L with y' = g
  std::optional<Elem> deriv_in_field(const Level& L, const Elem& g) const {
    Int r;
    try {
      r = integ(L, g);
    } catch (const NotElem&) {
      return std::nullopt;
    } catch (const NeedConstants&) {
      return std::nullopt;
    }
    absorb(L, r, {});
    if (!r.logs.empty()) return std::nullopt;
    return r.v0;
  }

  std::optional<Elem> rde_trans(const Level& L, Elem f, Elem g) const {
    const Level& Kl = K(L);
    // weak normalization
    Elem qw = one(L);
    {
      int k;
      Poly dn;
      split(L, f.d, k, dn);
      Poly gq = pgcd(Kl, dn, pdiff(Kl, dn));
      Poly sp = pexact(Kl, dn, gq);
      Poly d1 = pexact(Kl, sp, pgcd(Kl, sp, gq));
      if (deg(d1) > 0) {
        Poly s, t;
        pdiophant(Kl, pexact(Kl, f.d, d1), d1, f.n, s, t);
        Poly Dd1 = pderive(L, d1);
        Poly r = resultant_y(Kl, d1, s, Dd1);
        Poly qp{one(Kl)};
        for (long n : int_roots(Kl, r)) {
          Poly gg = pgcd(Kl, psub(Kl, s, pscaleq(Kl, Dd1, Q(n))), d1);
          qp = pmul(Kl, qp, ppow(Kl, gg, n));
        }
        if (deg(qp) > 0) {
          qw = E(L, qp);
          f = sub(L, f, div(L, derive(L, qw), qw));
          g = mul(L, g, qw);
        }
      }
    }
    // normal denominator
    int kd, ke;
    Poly dn, en;
    split(L, f.d, kd, dn);
    split(L, g.d, ke, en);
    Poly p = pgcd(Kl, dn, en);
    Poly h = pexact(Kl, pgcd(Kl, en, pdiff(Kl, en)), pgcd(Kl, p, pdiff(Kl, p)));
    Poly a = pmul(Kl, dn, h);
    if (!prem(Kl, pmul(Kl, a, h), en).empty()) return std::nullopt;
    Elem hn = E(L, h);
    Elem b = sub(L, mul(L, E(L, a), f), mul(L, E(L, dn), derive(L, hn)));
    Elem c = mul(L, E(L, pmul(Kl, a, h)), g);
    // special denominator
    Poly A, B, Cp;
    Elem hs = one(L);
    if (L.gen != GenKind::Exp) {
      A = a;
      B = P(L, b);
      Cp = P(L, c);
    } else {
      bool bz = is_zero(L, b);
      int nb = bz ? 1 << 20 : ord_t(Kl, b.n) - ord_t(Kl, b.d);
      int nc = ord_t(Kl, c.n) - ord_t(Kl, c.d);
      int n = std::min(0, nc - std::min(0, nb));
      Elem eta = eta_d(L);
      if (!bz && nb == 0) {
        Elem b0 = div(Kl, b.n[0], b.d[0]);
        Elem alpha = neg(Kl, div(Kl, b0, a[0]));
        auto pl = log_deriv(Kl, alpha, eta);
        if (pl && pl->q == 1 && pl->m.fits_slong_p()) n = std::min<long>(n, pl->m.get_si());
      }
      int N = std::max({0, -nb, n - nc});
      Elem tN = E(L, tpow(L, N));
      A = pmul(Kl, a, tpow(L, N));
      B = P(L, mul(L, add(L, b, mul(L, E(L, a), lift1(L, scale(Kl, eta, Q(n))))), tN));
      Cp = P(L, mul(L, c, E(L, tpow(L, N - n))));
      hs = E(L, tpow(L, -n));
    }
    long n = bound_degree(L, A, B, Cp);
    // SPDE
    Poly alpha{one(Kl)}, beta;
    std::optional<Poly> y;
    while (true) {
      if (Cp.empty()) {
        y = Poly{};
        break;
      }
      if (n < 0) return std::nullopt;
      Poly gg = pgcd(Kl, A, B);
      if (!prem(Kl, Cp, gg).empty()) return std::nullopt;
      if (deg(gg) > 0 || !is_one(Kl, lc(gg))) {
        A = pexact(Kl, A, gg);
        B = B.empty() ? B : pexact(Kl, B, gg);
        Cp = pexact(Kl, Cp, gg);
      }
      if (deg(A) == 0) {
        Elem ai = inv(Kl, A[0]);
        B = pscale(Kl, B, ai);
        Cp = pscale(Kl, Cp, ai);
        y = solve_poly_rde(L, B, Cp, n);
        if (!y) return std::nullopt;
        break;
      }
      Poly r, z;
      pdiophant(Kl, B, A, Cp, r, z);
      B = padd(Kl, B, pderive(L, A));
      Cp = psub(Kl, z, pderive(L, r));
      n -= deg(A);
      beta = padd(Kl, beta, pmul(Kl, alpha, r));
      alpha = pmul(Kl, alpha, A);
    }
    Elem zsol = E(L, padd(Kl, pmul(Kl, alpha, *y), beta));
    zsol = div(L, zsol, mul(L, hn, hs));
    return div(L, zsol, qw);
  }

  long bound_degree(const Level& L, const Poly& A, const Poly& B, const Poly& Cp) const {
    const Level& Kl = K(L);
    long da = deg(A), db = B.empty() ? -1000000 : deg(B), dc = deg(Cp);
    Elem alpha = B.empty() ? zero(Kl) : neg(Kl, div(Kl, lc(B), lc(A)));
    long n = 0;
    auto as_int = [&](const Elem& e, long& out) {
      Q q;
      if (!as_rational(Kl, e, q) || q.get_den() != 1 || !q.get_num().fits_slong_p()) return false;
      out = q.get_num().get_si();
      return true;
    };
    if (is_var(L)) {
      n = std::max(0L, dc - std::max(db, da - 1));
      long al;
      if (db == da - 1 && as_int(alpha, al)) n = std::max({0L, al, dc - db});
    } else if (L.gen == GenKind::Log) {
      n = db > da ? std::max(0L, dc - db) : std::max(0L, dc - da + 1);
      Elem w = eta_d(L);
      if (db == da - 1) {
        auto lim = limited_integrate(Kl, alpha, w);
        long m;
        if (lim && as_int(lim->second, m)) n = std::max(n, m);
      } else if (db == da) {
        auto pl = log_deriv(Kl, alpha, std::nullopt);
        if (pl && pl->q == 1) {
          Elem z = pl->z;
          Poly s = padd(Kl, pscale(Kl, A, derive(Kl, z)), pscale(Kl, B, z));
          if (!s.empty()) {
            Elem beta = neg(Kl, div(Kl, lc(s), mul(Kl, z, lc(A))));
            auto lim = limited_integrate(Kl, beta, w);
            long m;
            if (lim && as_int(lim->second, m)) n = std::max(n, m);
          }
        }
      }
    } else {
      n = std::max(0L, dc - std::max(db, da));
      if (da == db) {
        auto pl = log_deriv(Kl, alpha, eta_d(L));
        if (pl && pl->q == 1 && pl->m.fits_slong_p()) n = std::max(n, pl->m.get_si());
      }
    }
    return n;
  }

  // y' + b y = c with y in K[t] of degree at most n
  std::optional<Poly> solve_poly_rde(const Level& L, const Poly& b, const Poly& c, long n) const {
    const Level& Kl = K(L);
    if (c.empty()) return Poly{};
    if (is_var(L)) {
      if (!b.empty()) return no_cancel_large(L, b, c, n);
      Poly y = poly_integral(Kl, c);
      if (deg(y) > n) return std::nullopt;
      return y;
    }
    if (!b.empty() && deg(b) > 0) return no_cancel_large(L, b, c, n);
    if (b.empty()) {
      auto y = deriv_in_field(L, E(L, c));
      if (!y || !is_poly(L, *y) || deg(y->n) > n) return std::nullopt;
      return y->n;
    }
    return cancel(L, b[0], c, n);
  }

  std::optional<Poly> no_cancel_large(const Level& L, const Poly& b, Poly c, long n) const {
    const Level& Kl = K(L);
    Poly q;
    while (!c.empty()) {
      long m = deg(c) - deg(b);
      if (m < 0 || m > n) return std::nullopt;
      Poly p = pmono(Kl, div(Kl, lc(c), lc(b)), static_cast<int>(m));
      q = padd(Kl, q, p);
      n = m - 1;
      c = psub(Kl, c, padd(Kl, pderive(L, p), pmul(Kl, b, p)));
    }
    return q;
  }

  std::optional<Poly> cancel(const Level& L, const Elem& b, Poly c, long n) const {
    const Level& Kl = K(L);
    bool ex = L.gen == GenKind::Exp;
    std::optional<Elem> eta;
    if (ex) eta = eta_d(L);
    auto pl = log_deriv(Kl, b, eta);
    if (pl && pl->q == 1) {
      // b = (z t^m)'/(z t^m): integrate directly
      Elem zt = lift1(L, pl->z);
      long m = ex ? pl->m.get_si() : 0;
      if (m > 0) zt = mul(L, zt, E(L, tpow(L, m)));
      if (m < 0) zt = div(L, zt, E(L, tpow(L, -m)));
      auto P0 = deriv_in_field(L, mul(L, zt, E(L, c)));
      if (!P0) return std::nullopt;
      Elem hh = inv(L, zt);
      Elem q0 = mul(L, *P0, hh);
      auto ok = [&](const Elem& q) { return is_poly(L, q) && deg(q.n) <= n; };
      if (ok(q0)) return q0.n;
      // q0 + k hh for a constant k
      std::optional<Elem> k;
      Poly qq, qr, hq, hr;
      pdivmod(Kl, q0.n, q0.d, qq, qr);
      pdivmod(Kl, hh.n, hh.d, hq, hr);
      Elem kc;
      if (!hr.empty()) {
        Elem ratio = neg(L, div(L, frac(L, qr, q0.d), frac(L, hr, hh.d)));
        if (to_const(L, ratio, kc)) k = kc;
      } else if (!qr.empty()) {
        return std::nullopt;
      } else if (deg(qq) == deg(hq)) {
        Elem ratio = neg(Kl, div(Kl, lc(qq), lc(hq)));
        if (to_const(Kl, ratio, kc)) k = kc;
      }
      if (!k) return std::nullopt;
      Elem q1 = add(L, q0, mul(L, cup(L, *k), hh));
      if (ok(q1)) return q1.n;
      return std::nullopt;
    }
    if (n < deg(c)) return std::nullopt;
    Poly q;
    while (!c.empty()) {
      int m = deg(c);
      if (n < m) return std::nullopt;
      Elem bm = b;
      if (ex) bm = add(Kl, b, scale(Kl, *eta, Q(m)));
      auto s = rde(Kl, bm, lc(c));
      if (!s) return std::nullopt;
      Poly stm = pmono(Kl, *s, m);
      q = padd(Kl, q, stm);
      n = m - 1;
      c = psub(Kl, c, padd(Kl, pscale(Kl, stm, b), pderive(L, stm)));
      if (!c.empty() && deg(c) >= m) throw std::logic_error("cancellation step did not lower the degree");
    }
    return q;
  }

 public:
  Int integrate_top(const Elem& f) const {
    const Level& L = T_.top();
    Int r = integ(L, f);
    absorb(L, r, {});
    return r;
  }

  // public wrapper for Hermite
  std::pair<Elem, Elem> hermite_pair(const Level& L, const Elem& f) const {
    Herm H = hermite(L, f);
    Elem h = H.D.empty() ? zero(L) : frac(L, H.A, H.D);
    Elem r = E(L, H.q);
    if (!H.B.empty()) r = add(L, r, frac(L, H.B, tpow(L, H.k)));
    return {H.g, add(L, h, r)};
  }

  RTResult rt_public(const Level& L, const Elem& h) const {
    RTResult R;
    if (is_zero(L, h)) {
      R.rest = zero(K(L));
      return R;
    }
    try {
      R = rt(L, h.n, h.d);
    } catch (const NeedConstants& nc) {
      R.extension = nc.p;
    }
    return R;
  }

 private:
  const DiffTower& T_;
  const Level& C_;
};

// x^2 - s with s the squarefree part of the discriminant, when it is rational
Poly quadratic_radical(const Level& C, const Poly& p) {
  if (deg(p) != 2) return p;
  Elem disc = sub(C, mul(C, p[1], p[1]), scale(C, mul(C, p[0], p[2]), Q(4)));
  Q d;
  if (!as_rational(C, disc, d)) return p;
  Z n = d.get_num() * d.get_den();
  Z s = n < 0 ? Z(-1) : Z(1);
  n = abs(n);
  for (Z q = 2; q * q <= n; ++q) {
    Z qq = q * q;
    while (n % qq == 0) n /= qq;
    if (n % q == 0) {
      s *= q;
      n /= q;
    }
    if (q > 100000) return p;
  }
  s *= n;
  return Poly{from_q(C, Q(-s)), zero(C), one(C)};
}

std::string ext_name(const DiffTower& T, const Poly& p) {
  std::vector<std::string> taken = T.field.symbols();
  taken.push_back(T.var);
  for (auto& m : T.monomials) taken.push_back(m.level->name);
  const Level& C = T.field.level();
  bool is_i = deg(p) == 2 && is_zero(C, p[1]) && is_one(C, p[0]);
  return fresh_name(taken, is_i ? "i" : "r");
}

}  // namespace

std::pair<Elem, Elem> hermite_reduce(const DiffTower& T, const Level& L, const Elem& f) {
  if (is_zero(L, f)) return {zero(L), zero(L)};
  return Risch(T).hermite_pair(L, f);
}

RTResult rothstein_trager(const DiffTower& T, const Level& L, const Elem& h) { return Risch(T).rt_public(L, h); }

std::optional<Elem> rde_solve(const DiffTower& T, const Level& L, const Elem& f, const Elem& g) {
  return Risch(T).rde(L, f, g);
}

Expr IntegrationResult::antiderivative() const {
  std::vector<Expr> terms{tower.to_expr(v0)};
  for (auto& lg : logs)
    terms.push_back(e_mul(tower.to_expr(tower.field.level(), lg.c), e_log(tower.to_expr(lg.v))));
  return e_add(terms);
}

Elem IntegrationResult::residual() const {
  const Level& L = tower.top();
  Elem r = sub(L, derive(L, v0), f);
  for (auto& lg : logs)
    r = add(L, r, mul(L, lift(L, tower.field.level(), lg.c), div(L, derive(L, lg.v), lg.v)));
  return r;
}

IntegrationResult risch_integrate(const Elem& f, const DiffTower& T0) {
  IntegrationResult out;
  out.tower = T0;
  out.f = f;
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      Risch R(out.tower);
      Int r = R.integrate_top(out.f);
      out.kind = IntegrationResult::Elementary;
      out.v0 = r.v0;
      out.logs = r.logs;
      if (!is_zero(out.tower.top(), out.residual())) throw std::logic_error("antiderivative does not verify");
      return out;
    } catch (const NotElem& ne) {
      out.kind = IntegrationResult::NotElementary;
      out.stage = ne.stage;
      out.detail = ne.detail;
      return out;
    } catch (const Unsupported& u) {
      out.kind = IntegrationResult::Unsupported;
      out.detail = u.what();
      return out;
    } catch (const FactorUnsupported& u) {
      out.kind = IntegrationResult::Unsupported;
      out.detail = u.what();
      return out;
    } catch (const NeedConstants& nc) {
      Poly mp = quadratic_radical(out.tower.field.level(), nc.p);
      ConstField F = out.tower.field.with_algebraic(ext_name(out.tower, mp), mp);
      DiffTower N = tower_extend_constants(out.tower, F);
      out.f = tower_translate(out.tower, N, out.f);
      out.tower = N;
    }
  }
  out.kind = IntegrationResult::Unsupported;
  out.detail = "too many constant extensions";
  return out;
}

IntegrationResult risch_integrate(const Expr& f, const ConstField& F, const std::string& var) {
  auto [T, e] = tower_build(f, F, var);
  return risch_integrate(e, T);
}

}  // namespace finterm
