#include "finterm/tower.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "finterm/factor.hpp"

namespace finterm {

const Monomial* DiffTower::monomial(const Level& L) const {
  for (auto& m : monomials)
    if (m.level.get() == &L) return &m;
  return nullptr;
}

Expr DiffTower::gen_expr(const Level& L) const {
  if (&L == zlevel.get()) return e_var(var);
  if (auto m = monomial(L)) return m->expr;
  return e_sym(L.name);
}

Expr DiffTower::to_expr(const Level& L, const Elem& e) const {
  return level_elem_to_expr(L, e, [this](const Level& l) { return gen_expr(l); });
}

const FreshConstant* DiffTower::fresh_def(const std::string& name) const {
  for (auto& f : fresh)
    if (f.name == name) return &f;
  return nullptr;
}

// ---------------------------------------------------------------- linear algebra over Q

std::vector<std::vector<Q>> flatten(const Level& L, const std::vector<Elem>& es) {
  std::vector<std::vector<Q>> out(es.size());
  if (L.kind == LevelKind::Base) {
    for (size_t i = 0; i < es.size(); ++i) out[i] = {es[i].q};
    return out;
  }
  const Level& K = *L.base;
  std::vector<Poly> ps;
  if (L.kind == LevelKind::Trans) {
    Poly D{one(K)};
    for (auto& e : es) {
      Poly g = pgcd(K, D, e.d);
      D = pmul(K, D, pquo(K, e.d, g));
    }
    for (auto& e : es) ps.push_back(pmul(K, e.n, pquo(K, D, e.d)));
  } else {
    for (auto& e : es) ps.push_back(e.n);
  }
  int top = 0;
  for (auto& p : ps) top = std::max(top, deg(p) + 1);
  for (int i = 0; i < top; ++i) {
    std::vector<Elem> cs;
    for (auto& p : ps) cs.push_back(i < static_cast<int>(p.size()) ? p[i] : zero(K));
    auto sub = flatten(K, cs);
    for (size_t k = 0; k < es.size(); ++k) out[k].insert(out[k].end(), sub[k].begin(), sub[k].end());
  }
  return out;
}

std::optional<std::vector<Q>> solve_rational(const std::vector<std::vector<Q>>& A0, const std::vector<Q>& b0) {
  size_t rows = A0.size();
  size_t cols = rows ? A0[0].size() : 0;
  std::vector<std::vector<Q>> A = A0;
  std::vector<Q> b = b0;
  std::vector<int> pivcol;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && A[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(A[p], A[r]);
    std::swap(b[p], b[r]);
    Q iv = 1 / A[r][c];
    for (size_t j = c; j < cols; ++j) A[r][j] *= iv;
    b[r] *= iv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      Q f = A[i][c];
      for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
      b[i] -= f * b[r];
    }
    pivcol.push_back(static_cast<int>(c));
    ++r;
  }
  for (size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<Q> x(cols, Q(0));
  for (size_t i = 0; i < pivcol.size(); ++i) x[pivcol[i]] = b[i];
  return x;
}

std::optional<std::vector<Q>> span_solve(const Level& L, const Elem& target, const std::vector<Elem>& vs) {
  if (vs.empty()) {
    if (is_zero(L, target)) return std::vector<Q>{};
    return std::nullopt;
  }
  std::vector<Elem> all = vs;
  all.push_back(target);
  auto fl = flatten(L, all);
  size_t n = fl[0].size();
  std::vector<std::vector<Q>> A(n, std::vector<Q>(vs.size()));
  std::vector<Q> b(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < vs.size(); ++k) A[i][k] = fl[k][i];
    b[i] = fl.back()[i];
  }
  return solve_rational(A, b);
}

// ---------------------------------------------------------------- building

namespace {

struct ConstDecl {
  enum Kind { Trans, Sqrt } kind = Trans;
  std::string name;
  Expr def;       // numeric definition
  Expr radicand;  // Sqrt
  std::string key;  // branch constants of log(...)
  Expr expc;      // exp(c) constants
};

struct BuildConfig {
  std::vector<ConstDecl> decls;
  std::map<std::string, long> rebase;
};

struct Restart {};

using Part = std::pair<LevelPtr, Elem>;

class Builder {
 public:
  Builder(BuildConfig& cfg, const ConstField& user, const std::string& var) : cfg_(cfg) {
    ConstField F = user;
    for (auto& d : cfg.decls) {
      if (d.kind == ConstDecl::Trans) {
        F = F.with_transcendental(d.name);
      } else {
        Elem B = expr_to_const(d.radicand, F);
        const Level& K = F.level();
        F = F.with_algebraic(d.name, Poly{neg(K, B), zero(K), one(K)});
      }
      T.fresh.push_back({d.name, d.def});
    }
    T.field = F;
    T.var = var;
    T.zlevel = make_var(F.top, var);
    for (auto& d : cfg.decls)
      if (d.expc) exp_table_.push_back({expr_to_const(d.expc, F), d.name});
  }

  DiffTower T;

  const Level& top() { return T.top(); }

  Elem up(const Part& p) { return lift(top(), *p.first, p.second); }
  Part here(const Elem& e) { return {T.top_ptr(), e}; }

  Elem conv(const Expr& e) {
    switch (e->kind) {
      case ExprKind::Num:
        return from_q(top(), e->num);
      case ExprKind::Sym: {
        LevelPtr L = T.field.find(e->name);
        if (!L) throw std::invalid_argument("unknown constant " + e->name);
        return lift(top(), *L, gen(*L));
      }
      case ExprKind::Var:
        if (e->name != T.var) throw std::invalid_argument("unexpected variable " + e->name);
        return lift(top(), *T.zlevel, gen(*T.zlevel));
      case ExprKind::Add:
      case ExprKind::Mul: {
        std::vector<Part> ps;
        for (auto& a : e->args) ps.push_back(here(conv(a)));
        bool add_ = e->kind == ExprKind::Add;
        Elem r = add_ ? zero(top()) : one(top());
        for (auto& p : ps) r = add_ ? add(top(), r, up(p)) : mul(top(), r, up(p));
        return r;
      }
      case ExprKind::Pow: {
        Elem b = conv(e->args[0]);
        const Q& r = e->num;
        if (r.get_den() == 1) return pow(top(), b, r.get_num().get_si());
        if (r.get_den() == 2) {
          Elem s = sqrt_elem(b);
          return pow(top(), s, r.get_num().get_si());
        }
        throw AlgebraicMonomialUnsupported("power " + r.get_str() + " of " + print(e->args[0]));
      }
      case ExprKind::Exp:
        return exp_elem(conv(e->args[0]));
      case ExprKind::Log:
        return log_elem(conv(e->args[0]), e);
      case ExprKind::Inv:
        throw std::invalid_argument("inverse symbol " + e->name + " cannot enter a tower");
    }
    return zero(top());
  }

 private:
  BuildConfig& cfg_;
  std::vector<std::pair<Elem, std::string>> exp_table_;
  std::map<const Level*, std::pair<std::string, long>> exp_keys_;

  std::vector<std::string> taken() {
    std::vector<std::string> s = T.field.symbols();
    for (auto& d : cfg_.decls) s.push_back(d.name);
    s.push_back(T.var);
    return s;
  }

  std::string mono_name() { return "th" + std::to_string(T.monomials.size() + 1); }

  [[noreturn]] void restart_with(ConstDecl d) {
    cfg_.decls.push_back(std::move(d));
    throw Restart{};
  }

  Elem to_field(const Elem& c) {
    Elem low;
    const Level* M = min_level(top(), c, low);
    if (!M->constant || M->depth > T.field.level().depth)
      throw std::logic_error("expected a constant element");
    return lift(T.field.level(), *M, low);
  }

  Elem from_field(const Elem& c) { return lift(top(), T.field.level(), c); }

  // vectors spanning the known logarithmic derivatives
  std::vector<Elem> span_vectors(std::vector<size_t>& idx) {
    std::vector<Elem> ws;
    for (size_t i = 0; i < T.monomials.size(); ++i) {
      const Level& L = *T.monomials[i].level;
      if (L.gen != GenKind::Exp && L.gen != GenKind::Log) continue;
      ws.push_back(lift(top(), L, T.monomials[i].w));
      idx.push_back(i);
    }
    return ws;
  }

  Elem new_monomial(LevelPtr L, Expr ex, Elem w) {
    T.monomials.push_back({L, std::move(ex), std::move(w)});
    return gen(*L);
  }

  Elem sqrt_elem(const Elem& B) {
    try {
      if (auto r = sqrt_in_field(top(), B)) return *r;
    } catch (const FactorUnsupported& e) {
      throw CannotCertifyMonomial(std::string("square root test: ") + e.what());
    }
    Elem low;
    const Level* M = min_level(top(), B, low);
    if (M->constant) {
      Expr rad = const_to_expr(T.field, lift(T.field.level(), *M, low));
      ConstDecl d;
      d.kind = ConstDecl::Sqrt;
      d.name = fresh_name(taken(), "s");
      d.radicand = rad;
      d.def = e_pow_raw(rad, Q(1, 2));
      restart_with(d);
    }
    if (M->kind == LevelKind::Trans) {
      const Level& K = *M->base;
      Poly nd = pmul(K, low.n, low.d);
      Elem lcv = lc(nd);
      Poly monic = pscale(K, nd, inv(K, lcv));
      Poly sq{one(K)}, odd{one(K)};
      for (auto& [f, m] : psqf(K, monic)) {
        if (m / 2) sq = pmul(K, sq, ppow(K, f, m / 2));
        if (m % 2) odd = pmul(K, odd, f);
      }
      if (M->gen == GenKind::Exp && deg(odd) > 0 && is_zero(K, odd[0])) {
        auto it = exp_keys_.find(M);
        if (it == exp_keys_.end()) throw std::logic_error("exp level without key");
        cfg_.rebase[it->second.first] = 2 * it->second.second;
        throw Restart{};
      }
      Part s = here(lift(top(), *M, frac(*M, sq, low.d)));
      Part rl = here(sqrt_elem(lift(top(), K, lcv)));
      if (deg(odd) == 0) return mul(top(), up(s), up(rl));
      Elem R = lift(top(), *M, frac(*M, odd, Poly{one(K)}));
      Elem rr;
      std::optional<Elem> r;
      try {
        r = sqrt_in_field(top(), R);
      } catch (const FactorUnsupported& e) {
        throw CannotCertifyMonomial(std::string("square root test: ") + e.what());
      }
      rr = r ? *r : new_root(R);
      return mul(top(), mul(top(), up(s), up(rl)), rr);
    }
    return new_root(B);
  }

  Elem new_root(const Elem& R) {
    Expr arg = T.to_expr(R);
    LevelPtr L = make_root(T.top_ptr(), mono_name(), R);
    return new_monomial(L, e_pow(arg, Q(1, 2)), zero(*L));
  }

  Elem exp_const(const Elem& c) {
    if (is_zero(T.field.level(), c)) return one(top());
    const Level& F = T.field.level();
    for (auto& [cv, name] : exp_table_) {
      Q q;
      if (!as_rational(F, div(F, c, cv), q)) continue;
      LevelPtr L = T.field.find(name);
      if (q.get_den() == 1) return from_field(pow(F, lift(F, *L, gen(*L)), q.get_num().get_si()));
      for (auto& d : cfg_.decls)
        if (d.name == name) {
          d.expc = e_div(d.expc, e_num(q.get_den()));
          d.def = e_exp(d.expc);
        }
      throw Restart{};
    }
    ConstDecl d;
    d.name = fresh_name(taken(), "E");
    d.expc = const_to_expr(T.field, c);
    d.def = e_exp(d.expc);
    restart_with(d);
  }

  Elem exp_elem(const Elem& A) {
    if (is_zero(top(), A)) return one(top());
    Elem DA = derive(top(), A);
    if (is_zero(top(), DA)) return exp_const(to_field(A));
    std::vector<size_t> idx;
    auto ws = span_vectors(idx);
    auto sol = span_solve(top(), DA, ws);
    if (sol) {
      Elem c = A;
      bool rebase = false;
      for (size_t k = 0; k < idx.size(); ++k) {
        const Q& x = (*sol)[k];
        if (x == 0) continue;
        const Level& L = *T.monomials[idx[k]].level;
        if (L.gen == GenKind::Exp) {
          c = sub(top(), c, scale(top(), lift(top(), *L.base, L.arg), x));
          if (x.get_den() != 1) {
            auto& key = exp_keys_.at(&L);
            cfg_.rebase[key.first] = key.second * x.get_den().get_si();
            rebase = true;
          }
        } else {
          c = sub(top(), c, scale(top(), lift(top(), L, gen(L)), x));
        }
      }
      if (rebase) throw Restart{};
      if (!is_zero(top(), derive(top(), c))) throw std::logic_error("exp relation with non-constant remainder");
      std::vector<Part> ps;
      ps.push_back(here(exp_const(to_field(c))));
      for (size_t k = 0; k < idx.size(); ++k) {
        const Q& x = (*sol)[k];
        if (x == 0) continue;
        LevelPtr L = T.monomials[idx[k]].level;
        if (L->gen == GenKind::Exp) {
          ps.push_back(here(lift(top(), *L, pow(*L, gen(*L), x.get_num().get_si()))));
        } else if (x.get_den() == 1) {
          ps.push_back(here(lift(top(), *L->base, pow(*L->base, L->arg, x.get_num().get_si()))));
        } else if (x.get_den() == 2) {
          Elem s = sqrt_elem(lift(top(), *L->base, L->arg));
          ps.push_back(here(pow(top(), s, x.get_num().get_si())));
        } else {
          throw AlgebraicMonomialUnsupported("power " + x.get_str() + " of " + print(T.to_expr(*L->base, L->arg)));
        }
      }
      Elem r = one(top());
      for (auto& p : ps) r = mul(top(), r, up(p));
      return r;
    }
    std::string key = print(T.to_expr(A));
    long D = 1;
    if (auto it = cfg_.rebase.find(key); it != cfg_.rebase.end()) D = it->second;
    Elem arg = scale(top(), A, Q(1, D));
    Expr ex = e_exp(T.to_expr(arg));
    LevelPtr L = make_exp(T.top_ptr(), mono_name(), arg);
    exp_keys_[L.get()] = {key, D};
    Elem w = lift1(*L, derive(*L->base, arg));
    Elem th = new_monomial(L, ex, w);
    return pow(*L, th, D);
  }

  Elem branch_constant(const std::string& key, const Expr& def) {
    for (auto& d : cfg_.decls)
      if (d.key == key) {
        LevelPtr L = T.field.find(d.name);
        return lift(top(), *L, gen(*L));
      }
    ConstDecl d;
    d.name = fresh_name(taken(), "c");
    d.key = key;
    d.def = def;
    restart_with(d);
  }

  Elem log_elem(const Elem& G, const Expr& orig) {
    std::string key = print(orig);
    if (is_zero(top(), G)) throw std::domain_error("log(0)");
    for (auto& m : T.monomials) {
      const Level& L = *m.level;
      if (L.gen == GenKind::Log && eq(top(), lift(top(), *L.base, L.arg), G)) return lift(top(), L, gen(L));
    }
    bool need = false;
    Part r = here(log_parts(G, need));
    if (!need) return up(r);
    Expr def = e_sub(orig, T.to_expr(*r.first, r.second));
    Elem c = branch_constant(key, def);
    return add(top(), up(r), c);
  }

  Elem log_parts(const Elem& G, bool& need) {
    if (is_one(top(), G)) return zero(top());
    Elem DG = derive(top(), G);
    if (is_zero(top(), DG)) {
      need = true;
      return zero(top());
    }
    for (auto& m : T.monomials) {
      const Level& L = *m.level;
      if (L.gen == GenKind::Log && eq(top(), lift(top(), *L.base, L.arg), G)) return lift(top(), L, gen(L));
    }
    std::vector<size_t> idx;
    auto ws = span_vectors(idx);
    if (auto sol = span_solve(top(), div(top(), DG, G), ws)) {
      need = true;
      Elem r = zero(top());
      for (size_t k = 0; k < idx.size(); ++k) {
        const Q& x = (*sol)[k];
        if (x == 0) continue;
        const Level& L = *T.monomials[idx[k]].level;
        Elem v = L.gen == GenKind::Exp ? lift(top(), *L.base, L.arg) : lift(top(), L, gen(L));
        r = add(top(), r, scale(top(), v, x));
      }
      return r;
    }
    Elem low;
    const Level* M = min_level(top(), G, low);
    if (M->kind == LevelKind::Trans) {
      const Level& K = *M->base;
      Elem lcv = lc(low.n);
      Poly n = pscale(K, low.n, inv(K, lcv));
      std::vector<std::pair<Poly, int>> fs;
      auto decompose = [&](const Poly& p, int sign) {
        if (deg(p) <= 0) return;
        if (can_factor(K)) {
          for (auto& [f, m] : factor(K, p).factors) fs.push_back({f, sign * m});
        } else {
          for (auto& [f, m] : psqf(K, p)) fs.push_back({f, sign * m});
        }
      };
      decompose(n, 1);
      decompose(low.d, -1);
      bool single = fs.size() == 1 && fs[0].second == 1 && is_one(K, lcv);
      if (!single) {
        need = true;
        std::vector<Part> ps;
        if (!is_one(K, lcv)) ps.push_back(here(log_parts(lift(top(), K, lcv), need)));
        std::vector<int> mult;
        for (auto& [f, m] : fs) {
          Elem F = lift(top(), *M, frac(*M, f, Poly{one(K)}));
          ps.push_back(here(scale(top(), log_parts(F, need), Q(m))));
        }
        Elem r = zero(top());
        for (auto& p : ps) r = add(top(), r, up(p));
        return r;
      }
    }
    Expr ex = e_log(T.to_expr(G));
    LevelPtr L = make_log(T.top_ptr(), mono_name(), G);
    return new_monomial(L, ex, L->dgen);
  }
};

}  // namespace

Built tower_build_all(const std::vector<Expr>& es, const ConstField& field, const std::string& var) {
  BuildConfig cfg;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Builder b(cfg, field, var);
    try {
      std::vector<Part> ps;
      for (auto& e : es) {
        Elem x = b.conv(e);
        ps.push_back({b.T.top_ptr(), x});
      }
      Built out;
      for (auto& p : ps) out.elems.push_back(lift(b.T.top(), *p.first, p.second));
      out.tower = std::move(b.T);
      return out;
    } catch (const Restart&) {
      continue;
    } catch (const FactorUnsupported& e) {
      throw CannotCertifyMonomial(e.what());
    }
  }
  throw CannotCertifyMonomial("too many constant adjunctions while building the tower");
}

std::pair<DiffTower, Elem> tower_build(const Expr& e, const ConstField& field, const std::string& var) {
  Built b = tower_build_all({e}, field, var);
  return {std::move(b.tower), b.elems[0]};
}

Elem tower_derive(const DiffTower& T, const Elem& x) { return derive(T.top(), x); }

bool tower_is_constant(const DiffTower& T, const Elem& x) { return is_zero(T.top(), tower_derive(T, x)); }

std::string tower_dump(const DiffTower& T) {
  std::ostringstream os;
  os << "constants:";
  auto chain = T.field.chain();
  if (chain.size() == 1) os << " Q";
  for (auto& L : chain) {
    if (L->kind == LevelKind::Base) continue;
    os << "\n  " << L->name;
    if (L->kind == LevelKind::Alg) os << ": " << poly_string(*L->base, L->minpoly, L->name) << " = 0";
    if (auto f = T.fresh_def(L->name)) os << "  (" << L->name << " = " << print(f->def) << ")";
  }
  os << "\n" << T.var << "' = 1";
  for (auto& m : T.monomials) {
    const Level& L = *m.level;
    os << "\n" << L.name << " = " << print(m.expr) << ", " << L.name << "' = " << print(T.to_expr(L, L.dgen));
  }
  return os.str();
}

// ---------------------------------------------------------------- embedding into larger constant fields

const Level& tower_level(const DiffTower& from, const DiffTower& to, const Level& L) {
  if (&L == from.zlevel.get()) return *to.zlevel;
  for (size_t i = 0; i < from.monomials.size(); ++i)
    if (from.monomials[i].level.get() == &L) return *to.monomials[i].level;
  return L;
}

Elem tower_translate(const DiffTower& from, const DiffTower& to, const Level& L, const Elem& e) {
  const Level& L2 = tower_level(from, to, L);
  if (&L2 == &L) return e;
  std::function<Elem(const Elem&)> fc;
  if (&L == from.zlevel.get()) {
    fc = [&](const Elem& c) { return lift(to.field.level(), from.field.level(), c); };
  } else {
    fc = [&](const Elem& c) { return tower_translate(from, to, *L.base, c); };
  }
  Elem r;
  for (auto& c : e.n) r.n.push_back(fc(c));
  for (auto& c : e.d) r.d.push_back(fc(c));
  return r;
}

Elem tower_translate(const DiffTower& from, const DiffTower& to, const Elem& e) {
  return tower_translate(from, to, from.top(), e);
}

DiffTower tower_extend_constants(const DiffTower& T, const ConstField& F) {
  DiffTower N;
  N.field = F;
  N.fresh = T.fresh;
  N.var = T.var;
  N.zlevel = make_var(F.top, T.var);
  for (auto& m : T.monomials) {
    const Level& L = *m.level;
    Elem arg = tower_translate(T, N, *L.base, L.arg);
    LevelPtr base = N.top_ptr();
    LevelPtr nl;
    switch (L.gen) {
      case GenKind::Exp:
        nl = make_exp(base, L.name, arg);
        break;
      case GenKind::Log:
        nl = make_log(base, L.name, arg);
        break;
      default:
        nl = make_root(base, L.name, arg);
        break;
    }
    N.monomials.push_back({nl, m.expr, Elem{}});
    N.monomials.back().w = tower_translate(T, N, L, m.w);
  }
  return N;
}

// ---------------------------------------------------------------- numerics

std::vector<cplx> complex_roots(const std::vector<cplx>& coeffs) {
  int n = static_cast<int>(coeffs.size()) - 1;
  while (n > 0 && std::abs(coeffs[n]) == 0) --n;
  if (n <= 0) return {};
  std::vector<cplx> a(coeffs.begin(), coeffs.begin() + n + 1);
  for (auto& c : a) c /= coeffs[n];
  auto evalp = [&](cplx x) {
    cplx v = 0;
    for (int i = n; i >= 0; --i) v = v * x + a[i];
    return v;
  };
  auto evald = [&](cplx x) {
    cplx v = 0;
    for (int i = n; i >= 1; --i) v = v * x + a[i] * static_cast<double>(i);
    return v;
  };
  double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(a[i]));
  bound = 1 + bound;
  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(bound * 0.5 + 0.1, 2 * M_PI * k / n + 0.4);
  for (int it = 0; it < 500; ++it) {
    double moved = 0;
    for (int k = 0; k < n; ++k) {
      cplx p = evalp(z[k]), dp = evald(z[k]);
      if (std::abs(p) == 0) continue;
      cplx ratio = p / dp;
      cplx s = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += cplx(1) / (z[k] - z[j]);
      cplx step = ratio / (cplx(1) - ratio * s);
      z[k] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15 * bound) break;
  }
  return z;
}

cplx preferred_root(const std::vector<cplx>& coeffs) {
  auto rs = complex_roots(coeffs);
  if (rs.empty()) throw std::invalid_argument("no roots");
  cplx best = rs[0];
  for (auto& r : rs) {
    double tol = 1e-9 * (1 + std::abs(r));
    if (r.imag() > best.imag() + tol || (std::abs(r.imag() - best.imag()) <= tol && r.real() > best.real())) best = r;
  }
  return best;
}

NumEnv tower_numeric_env(const DiffTower& T, cplx z, const std::map<std::string, cplx>& given) {
  NumEnv env;
  env.values[T.var] = z;
  int k = 0;
  for (auto& L : T.field.chain()) {
    if (L->kind == LevelKind::Base) continue;
    ++k;
    if (auto it = given.find(L->name); it != given.end()) {
      env.values[L->name] = it->second;
    } else if (auto f = T.fresh_def(L->name)) {
      env.values[L->name] = eval(f->def, env);
    } else if (L->kind == LevelKind::Trans) {
      env.values[L->name] = cplx(0.61 + 0.37 * k, 0.23 + 0.05 * k);
    } else {
      std::vector<cplx> cs;
      for (auto& c : L->minpoly)
        cs.push_back(eval(level_elem_to_expr(*L->base, c, [](const Level& l) { return e_sym(l.name); }), env));
      env.values[L->name] = preferred_root(cs);
    }
  }
  return env;
}

}  // namespace finterm
