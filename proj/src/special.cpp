#include "finterm/special.hpp"

#include <stdexcept>

namespace finterm {

namespace {

SpecialResult from_risch(const IntegrationResult& r, std::vector<std::string> path) {
  SpecialResult out;
  out.path = std::move(path);
  out.path.push_back("risch");
  out.field = r.tower.field;
  out.fresh = r.tower.fresh;
  switch (r.kind) {
    case IntegrationResult::Elementary:
      out.kind = SpecialResult::Elementary;
      out.antiderivative = r.antiderivative();
      break;
    case IntegrationResult::NotElementary:
      out.kind = SpecialResult::NotElementary;
      out.detail = std::string(stage_name(r.stage)) + (r.detail.empty() ? "" : ": " + r.detail);
      break;
    default:
      out.kind = SpecialResult::Unsupported;
      out.detail = r.detail;
  }
  return out;
}

std::vector<FreshConstant> join(std::vector<FreshConstant> a, const std::vector<FreshConstant>& b) {
  for (auto& f : b) {
    bool seen = false;
    for (auto& g : a) seen = seen || g.name == f.name;
    if (!seen) a.push_back(f);
  }
  return a;
}

std::string aux_var(const std::string& var) { return var == "u" ? "t" : "u"; }

// f = a + b*s with s^2 = R monic, deg R in {1, 2}: Euler substitution
SpecialResult rationalize(const DiffTower& T, const Level& A, const Elem& a, const Elem& b) {
  const Level& Z = *T.zlevel;
  const Poly& R = A.arg.n;
  std::string u = aux_var(T.var);
  Expr z = e_var(T.var), uE = e_var(u), s = T.gen_expr(A);
  Expr phi, psi, chi;
  Expr gamma = const_to_expr(T.field, R[0]);
  if (deg(R) == 1) {
    phi = e_sub(e_pow(uE, Q(2)), gamma);
    psi = uE;
    chi = s;
  } else {
    Expr beta = const_to_expr(T.field, R[1]);
    phi = e_div(e_sub(e_pow(uE, Q(2)), gamma), e_add(beta, e_mul(e_num(Q(2)), uE)));
    psi = e_sub(uE, phi);
    chi = e_add(s, z);
  }
  Expr g = e_mul(e_add(substitute(T.to_expr(Z, a), T.var, phi), e_mul(substitute(T.to_expr(Z, b), T.var, phi), psi)),
                 differentiate(phi, u));
  auto r = risch_integrate(g, T.field, u);
  SpecialResult out = from_risch(r, {"sqrt radicand of degree " + std::to_string(deg(R)),
                                     "substitute " + u + " = " + print(chi)});
  out.fresh = join(T.fresh, out.fresh);
  if (out.kind == SpecialResult::Elementary) out.antiderivative = substitute(out.antiderivative, u, chi);
  return out;
}

// b*s with s^2 = R, deg R in {3, 4}: reduce b*R modulo derivatives of z^k s
SpecialResult genus_one(const DiffTower& T, const Level& A, const Elem& b) {
  const Level& Z = *T.zlevel;
  const Level& K = *Z.base;
  const Poly& R = A.arg.n;
  int d = deg(R);
  SpecialResult out;
  out.field = T.field;
  out.fresh = T.fresh;
  out.path = {"sqrt radicand of degree " + std::to_string(d)};
  Elem N = mul(Z, b, A.arg);
  if (deg(den(N)) > 0) {
    out.detail = "cofactor with poles over a genus-one radicand";
    return out;
  }
  Poly n = num(N), Y, dR = pdiff(K, R);
  while (deg(n) >= d - 1) {
    int k = deg(n) - d + 1;
    Poly M = pscaleq(K, dR, Q(1, 2));
    M = pshift(K, M, k);
    if (k > 0) M = padd(K, M, pscaleq(K, pshift(K, R, k - 1), Q(k)));
    Elem c = div(K, lc(n), lc(M));
    n = psub(K, n, pscale(K, M, c));
    Y = padd(K, Y, pmono(K, c, k));
  }
  out.path.push_back("reduce modulo d(z^k*sqrt)");
  if (n.empty()) {
    out.kind = SpecialResult::Elementary;
    out.antiderivative = e_mul(poly_to_expr(T.field, Y, T.var), T.gen_expr(A));
  } else if (d == 3 || deg(n) == 0) {
    out.kind = SpecialResult::NotElementary;
    out.detail = std::string(stage_name(NonElemStage::SpecialCriterion)) + ": remainder " +
                 print(poly_to_expr(T.field, n, T.var)) + " over a squarefree radicand";
  } else {
    out.detail = "pseudo-elliptic remainder over a quartic radicand";
  }
  return out;
}

}  // namespace

Expr poly_to_expr(const ConstField& F, const Poly& p, const std::string& var) {
  std::vector<Expr> terms;
  for (int k = deg(p); k >= 0; --k) {
    if (is_zero(F.level(), p[k])) continue;
    terms.push_back(e_mul(const_to_expr(F, p[k]), e_pow(e_var(var), Q(k))));
  }
  return e_add(terms);
}

bool exact_derivative_check(const Expr& W, const Expr& f, const ConstField& F, const std::string& var) {
  try {
    Built B = tower_build_all({differentiate(W, var), f}, F, var);
    return eq(B.tower.top(), B.elems[0], B.elems[1]);
  } catch (const std::exception&) {
    return false;
  }
}

SpecialResult integrate_elementary(const Expr& f, const ConstField& F, const std::string& var) {
  auto [T, e] = tower_build(f, F, var);
  bool alg = false;
  for (auto& m : T.monomials) alg = alg || m.level->gen == GenKind::Root;
  if (!alg) return from_risch(risch_integrate(e, T), {});
  SpecialResult out;
  out.field = T.field;
  out.fresh = T.fresh;
  if (T.monomials.size() != 1 || T.monomials[0].level->base != T.zlevel ||
      T.monomials[0].level->minpoly.size() != 3 || deg(den(T.monomials[0].level->arg)) > 0) {
    out.detail = "algebraic level outside the supported families";
    return out;
  }
  const Level& A = *T.monomials[0].level;
  const Level& Z = *T.zlevel;
  Elem a = e.n.size() > 0 ? e.n[0] : zero(Z);
  Elem b = e.n.size() > 1 ? e.n[1] : zero(Z);
  int d = deg(A.arg.n);
  if (d > 4) {
    out.detail = "radicand of degree " + std::to_string(d);
    return out;
  }
  if (d <= 2) {
    out = rationalize(T, A, a, b);
  } else {
    out = genus_one(T, A, b);
    if (!is_zero(Z, a) && out.kind != SpecialResult::NotElementary) {
      auto ra = from_risch(risch_integrate(T.to_expr(Z, a), T.field, T.var), {"rational part"});
      if (ra.kind != SpecialResult::Elementary) return ra;
      if (out.kind == SpecialResult::Elementary) {
        out.antiderivative = e_add(ra.antiderivative, out.antiderivative);
        out.field = ra.field;
        out.fresh = join(out.fresh, ra.fresh);
      }
    }
  }
  if (out.kind == SpecialResult::Elementary && !exact_derivative_check(out.antiderivative, T.to_expr(e), out.field, var))
    throw std::logic_error("algebraic witness failed the derivative check");
  return out;
}

SpecialResult elliptic_first_kind(const Poly& P, const ConstVal& c, const ConstField& F, const std::string& var) {
  const Level& K = F.level();
  if (deg(P) != 3 && deg(P) != 4) throw std::invalid_argument("radicand must have degree 3 or 4");
  if (is_zero(K, c)) throw std::invalid_argument("cofactor must be nonzero");
  Poly g = pgcd(K, P, pdiff(K, P));
  if (deg(g) == 0) {
    SpecialResult out;
    out.kind = SpecialResult::NotElementary;
    out.field = F;
    out.path = {"gcd(P, P') = 1"};
    out.detail = std::string(stage_name(NonElemStage::SpecialCriterion)) + ": squarefree radicand";
    return out;
  }
  Expr f = e_mul(const_to_expr(F, c), e_pow(poly_to_expr(F, P, var), Q(-1, 2)));
  SpecialResult out = integrate_elementary(f, F, var);
  out.path.insert(out.path.begin(), "repeated root " + print(poly_to_expr(F, pmonic(K, g), var)));
  if (out.kind != SpecialResult::Elementary) throw std::logic_error("degenerate radicand did not rationalize");
  return out;
}

SpecialResult chebyshev(const Q& p, const Q& q, const std::string& var) {
  ConstField F;
  Expr z = e_var(var);
  Expr omz = e_sub(e_num(Q(1)), z);
  bool pi = p.get_den() == 1, qi = q.get_den() == 1;
  Q s = p + q;
  s.canonicalize();
  bool si = s.get_den() == 1;
  if (pi && qi) {
    Expr f = e_mul(e_pow(z, p), e_pow(omz, q));
    return from_risch(risch_integrate(f, F, var), {"p, q in Z"});
  }
  if (!pi && !qi && !si) {
    SpecialResult out;
    out.kind = SpecialResult::NotElementary;
    out.field = F;
    out.path = {"p, q, p+q not in Z"};
    out.detail = stage_name(NonElemStage::SpecialCriterion);
    return out;
  }
  std::string u = aux_var(var);
  Expr uE = e_var(u);
  long n;
  Expr arg, g;
  std::string why;
  if (pi) {
    n = q.get_den().get_si();
    arg = omz;
    Expr un = e_pow(uE, Q(n));
    g = e_mul({e_num(Q(-n)), e_pow(e_sub(e_num(Q(1)), un), p), e_pow(uE, Q(Q(n) * q + (n - 1)))});
    why = "p in Z";
  } else if (qi) {
    n = p.get_den().get_si();
    arg = z;
    Expr un = e_pow(uE, Q(n));
    g = e_mul({e_num(Q(n)), e_pow(uE, Q(Q(n) * p + (n - 1))), e_pow(e_sub(e_num(Q(1)), un), q)});
    why = "q in Z";
  } else {
    n = q.get_den().get_si();
    arg = e_div(omz, z);
    Expr un = e_pow(uE, Q(n));
    g = e_mul({e_num(Q(-n)), e_pow(uE, Q(Q(n) * q + (n - 1))), e_pow(e_add(e_num(Q(1)), un), Q(-s - 2))});
    why = "p+q in Z";
  }
  Expr chi = e_pow(arg, Q(1, n));
  auto r = risch_integrate(g, F, u);
  SpecialResult out = from_risch(r, {why, "substitute " + u + " = " + print(chi)});
  if (out.kind != SpecialResult::Elementary) {
    if (out.kind == SpecialResult::NotElementary) throw std::logic_error("rational integrand reported non-elementary");
    return out;
  }
  out.antiderivative = substitute(out.antiderivative, u, chi);

  // exact check in C(z)(u), u^n = arg
  const DiffTower& U = r.tower;
  if (!U.monomials.empty()) throw std::logic_error("rational integrand built a transcendental tower");
  const Level& C = U.field.level();
  LevelPtr zl = make_var(U.field.top, var);
  Elem zz = gen(*zl), onez = one(*zl);
  Elem A = pi ? sub(*zl, onez, zz) : qi ? zz : div(*zl, sub(*zl, onez, zz), zz);
  LevelPtr rl = make_radical(zl, u, A, int(n));
  const Level& L = *rl;
  Elem x = gen(L);
  auto horner = [&](const Poly& P) {
    Elem acc = zero(L);
    for (int k = deg(P); k >= 0; --k) acc = add(L, mul(L, acc, x), lift(L, C, P[k]));
    return acc;
  };
  auto map = [&](const Elem& e) { return div(L, horner(num(e)), horner(den(e))); };
  Elem lhs = derive(L, map(r.v0));
  for (auto& lg : r.logs) {
    Elem v = map(lg.v);
    lhs = add(L, lhs, mul(L, lift(L, C, lg.c), div(L, derive(L, v), v)));
  }
  Elem Zt = lift(L, *zl, zz);
  Elem rhs;
  long e = Q(Q(n) * q).get_num().get_si();
  if (pi)
    rhs = mul(L, pow(L, Zt, p.get_num().get_si()), pow(L, x, e));
  else if (qi)
    rhs = mul(L, pow(L, x, Q(Q(n) * p).get_num().get_si()), pow(L, sub(L, one(L), Zt), q.get_num().get_si()));
  else
    rhs = mul(L, pow(L, Zt, s.get_num().get_si()), pow(L, x, e));
  if (!eq(L, lhs, rhs)) throw std::logic_error("Chebyshev witness failed the derivative check");
  out.path.push_back("derivative check in C(z)(" + u + ")");
  return out;
}

}  // namespace finterm
