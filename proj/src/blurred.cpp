#include "finterm/blurred.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "finterm/factor.hpp"
#include "finterm/tower.hpp"

namespace finterm {

// ---------------------------------------------------------------- presentation

int BlurredPresentation::index(const std::string& name) const {
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> BlurredPresentation::pairs() const {
  std::vector<int> out;
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i].kind == BlurredGen::NewExp || gens[i].kind == BlurredGen::NewLog) out.push_back(static_cast<int>(i));
  return out;
}

PresentationError::PresentationError(int l, size_t c, std::string t, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l), column(c), text(std::move(t)) {}

std::string PresentationError::caret() const { return text + "\n" + std::string(column, ' ') + "^"; }

namespace {

bool ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::vector<std::pair<std::string, size_t>> words(const std::string& s, size_t from) {
  std::vector<std::pair<std::string, size_t>> out;
  size_t i = from;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',') ++i;
    if (i > b) out.push_back({s.substr(b, i - b), b});
  }
  return out;
}

}  // namespace

BlurredPresentation parse_presentation(const std::string& text) {
  BlurredPresentation P;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool base_seen = false;
  struct Pending {
    int line;
    std::string text;
    std::vector<std::pair<std::string, size_t>> names;
    bool cut;
  };
  std::vector<Pending> pending;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    auto ws = words(line, 0);
    if (ws.empty()) continue;
    const std::string& kw = ws[0].first;
    auto fail = [&](size_t col, const std::string& msg) { throw PresentationError(lineno, col, raw, msg); };
    if (kw == "base") {
      if (ws.size() != 2 || (ws[1].first != "z" && ws[1].first != "const")) fail(ws[0].second, "expected 'base z' or 'base const'");
      if (!P.gens.empty()) fail(ws[0].second, "base must precede the generators");
      P.has_z = ws[1].first == "z";
      base_seen = true;
    } else if (kw == "const") {
      if (!P.gens.empty()) fail(ws[0].second, "constants must precede the generators");
      for (size_t k = 1; k < ws.size(); ++k) {
        if (!ident(ws[k].first) || ws[k].first == "z" || P.field.find(ws[k].first)) fail(ws[k].second, "bad constant name");
        P.field = P.field.with_transcendental(ws[k].first);
      }
    } else if (kw == "gen") {
      if (ws.size() < 2) fail(line.size(), "expected a generator name");
      const std::string name = ws[1].first.substr(0, ws[1].first.find('='));
      size_t at = ws[1].second;
      if (!ident(name) || name == "z" || P.field.find(name) || P.index(name) >= 0 || name == "free")
        fail(at, "bad or repeated generator name '" + name + "'");
      BlurredGen g;
      g.name = name;
      g.line = lineno;
      size_t rest = at + name.size();
      while (rest < line.size() && std::isspace(static_cast<unsigned char>(line[rest]))) ++rest;
      std::string tail = line.substr(rest);
      auto tw = words(tail, 0);
      if (tw.size() == 1 && tw[0].first == "free") {
        g.kind = BlurredGen::FreeGen;
      } else {
        if (rest >= line.size() || line[rest] != '=') fail(rest, "expected '=' or 'free'");
        size_t rhs = rest + 1;
        std::string body = line.substr(rhs);
        auto bw = words(body, 0);
        if (bw.size() == 1 && bw[0].first == "free") {
          g.kind = BlurredGen::FreeGen;
        } else {
          ParseOptions po;
          po.vars.clear();
          if (P.has_z) po.vars.push_back("z");
          for (auto& h : P.gens) po.vars.push_back(h.name);
          Expr e;
          try {
            e = parse(body, P.field, po);
          } catch (const ParseError& pe) {
            fail(rhs + pe.diag.position, pe.diag.message);
          }
          if (e->kind == ExprKind::Exp) {
            g.kind = BlurredGen::NewExp;
            g.arg = e->args[0];
          } else if (e->kind == ExprKind::Log) {
            g.kind = BlurredGen::NewLog;
            g.arg = e->args[0];
          } else {
            g.kind = BlurredGen::Defined;
            g.arg = e;
          }
        }
      }
      P.gens.push_back(std::move(g));
    } else if (kw == "cut" || kw == "target") {
      pending.push_back({lineno, raw, {ws.begin() + 1, ws.end()}, kw == "cut"});
    } else {
      fail(ws[0].second, "unknown keyword '" + kw + "'");
    }
  }
  (void)base_seen;
  for (auto& p : pending) {
    std::vector<int> idx;
    if (p.cut && p.names.size() == 1 && std::all_of(p.names[0].first.begin(), p.names[0].first.end(), ::isdigit)) {
      int n = std::stoi(p.names[0].first);
      if (n > static_cast<int>(P.gens.size())) throw PresentationError(p.line, p.names[0].second, p.text, "cut beyond the generator list");
      for (int i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (auto& [w, col] : p.names) {
        int i = P.index(w);
        if (i < 0) throw PresentationError(p.line, col, p.text, "unknown generator '" + w + "'");
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
      }
    }
    (p.cut ? P.cut : P.target) = idx;
  }
  return P;
}

std::string format_gen(const BlurredPresentation& P, int i) {
  const BlurredGen& g = P.gens[i];
  switch (g.kind) {
    case BlurredGen::NewExp: return "gen " + g.name + " = exp(" + print(g.arg) + ")";
    case BlurredGen::NewLog: return "gen " + g.name + " = log(" + print(g.arg) + ")";
    case BlurredGen::FreeGen: return "gen " + g.name + " free";
    default: return "gen " + g.name + " = " + print(g.arg);
  }
}

// ---------------------------------------------------------------- integer lattices

std::vector<std::vector<Z>> hermite_normal_form(std::vector<std::vector<Z>> A) {
  size_t m = A.size(), n = m ? A[0].size() : 0, r = 0;
  for (size_t c = 0; c < n && r < m; ++c) {
    for (size_t i = r + 1; i < m; ++i)
      while (A[i][c] != 0) {
        Z q = A[r][c] / A[i][c];
        for (size_t k = 0; k < n; ++k) A[r][k] -= q * A[i][k];
        std::swap(A[r], A[i]);
      }
    if (A[r][c] == 0) continue;
    if (A[r][c] < 0)
      for (auto& x : A[r]) x = -x;
    for (size_t i = 0; i < r; ++i) {
      Z q;
      mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
      for (size_t k = 0; k < n; ++k) A[i][k] -= q * A[r][k];
    }
    ++r;
  }
  A.resize(r);
  return A;
}

std::vector<Z> smith_normal_form(const std::vector<std::vector<Z>>& rows, std::vector<std::vector<Z>>* Vout) {
  std::vector<std::vector<Z>> W = rows;
  size_t m = W.size(), n = m ? W[0].size() : 0;
  std::vector<std::vector<Z>> V(n, std::vector<Z>(n, 0));
  for (size_t i = 0; i < n; ++i) V[i][i] = 1;
  auto colswap = [&](size_t a, size_t b) {
    for (auto& row : W) std::swap(row[a], row[b]);
    std::swap(V[a], V[b]);
  };
  // col_j -= q col_t
  auto colsub = [&](size_t j, size_t t, const Z& q) {
    for (auto& row : W) row[j] -= q * row[t];
    for (size_t k = 0; k < n; ++k) V[t][k] += q * V[j][k];
  };
  std::vector<Z> diag;
  for (size_t t = 0; t < std::min(m, n); ++t) {
    while (true) {
      size_t bi = m, bj = n;
      for (size_t i = t; i < m; ++i)
        for (size_t j = t; j < n; ++j)
          if (W[i][j] != 0 && (bi == m || abs(W[i][j]) < abs(W[bi][bj]))) bi = i, bj = j;
      if (bi == m) break;
      std::swap(W[t], W[bi]);
      if (bj != t) colswap(t, bj);
      bool clean = true;
      for (size_t i = t + 1; i < m; ++i) {
        Z q = W[i][t] / W[t][t];
        for (size_t k = 0; k < n; ++k) W[i][k] -= q * W[t][k];
        clean = clean && W[i][t] == 0;
      }
      for (size_t j = t + 1; j < n; ++j) {
        Z q = W[t][j] / W[t][t];
        if (q != 0) colsub(j, t, q);
        clean = clean && W[t][j] == 0;
      }
      if (!clean) continue;
      size_t bad = m;
      for (size_t i = t + 1; i < m && bad == m; ++i)
        for (size_t j = t + 1; j < n; ++j)
          if (W[i][j] % W[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad == m) break;
      for (size_t k = 0; k < n; ++k) W[t][k] += W[bad][k];
    }
    if (t >= m || W[t][t] == 0) break;
    diag.push_back(abs(W[t][t]));
  }
  if (Vout) *Vout = V;
  return diag;
}

std::vector<std::vector<Z>> saturate(const std::vector<std::vector<Z>>& rows) {
  if (rows.empty()) return {};
  std::vector<std::vector<Z>> V;
  auto d = smith_normal_form(rows, &V);
  V.resize(d.size());
  return hermite_normal_form(V);
}

namespace {

std::vector<Z> integer_row(const std::vector<Q>& r) {
  Z l = 1;
  for (auto& x : r) l = lcm(l, Z(x.get_den()));
  std::vector<Z> out;
  Z g = 0;
  for (auto& x : r) {
    out.push_back(Z(x * l));
    g = gcd(g, out.back());
  }
  if (g > 1)
    for (auto& x : out) x /= g;
  return out;
}

// ---------------------------------------------------------------- exact structure

struct Lin {
  Elem beta;                          // base part modulo constants
  std::map<std::string, Elem> coef;  // symbol keys, constant coefficients
};
using Mult = std::map<std::string, Q>;

struct Structure {
  const BlurredPresentation& P;
  const Level& K;
  LevelPtr zl;
  std::vector<std::optional<Lin>> lin;
  std::vector<std::optional<Mult>> mult;
  std::vector<bool> dep;
  std::vector<std::vector<Q>> coef;  // dependent pairs: combination of earlier pairs
  std::vector<int> pair_of;
  std::vector<int> pair_gen;
  std::vector<Lin> pa;
  std::vector<Mult> pm;
  std::vector<std::vector<Q>> relations;

  explicit Structure(const BlurredPresentation& p) : P(p), K(p.field.level()), zl(make_var(p.field.top, "z")) {
    size_t n = P.gens.size();
    lin.resize(n);
    mult.resize(n);
    dep.assign(n, false);
    coef.resize(n);
    pair_of.assign(n, -1);
    for (size_t i = 0; i < n; ++i) build(static_cast<int>(i));
  }

  bool is_base(const Expr& e) const {
    for (auto& g : P.gens)
      if (depends_on(e, g.name)) return false;
    return true;
  }

  Elem base_elem(const Expr& e) const {
    const Level& Z_ = *zl;
    switch (e->kind) {
      case ExprKind::Num: return from_q(Z_, e->num);
      case ExprKind::Sym: return lift(Z_, K, P.field.symbol(e->name));
      case ExprKind::Var: return gen(Z_);
      case ExprKind::Add: {
        Elem s = zero(Z_);
        for (auto& a : e->args) s = add(Z_, s, base_elem(a));
        return s;
      }
      case ExprKind::Mul: {
        Elem s = one(Z_);
        for (auto& a : e->args) s = mul(Z_, s, base_elem(a));
        return s;
      }
      case ExprKind::Pow:
        if (e->num.get_den() == 1) return pow(Z_, base_elem(e->args[0]), e->num.get_num().get_si());
        [[fallthrough]];
      default: throw std::invalid_argument("base element " + print(e) + " is not a rational function of z");
    }
  }

  Elem modc(const Elem& b) const {
    const Level& Z_ = *zl;
    if (is_zero(Z_, b)) return b;
    Poly q = pquo(K, b.n, b.d);
    if (q.empty()) return b;
    return sub(Z_, b, lift(Z_, K, q[0]));
  }

  static void add_to(const Level& K, Lin& a, const Lin& b, const Elem& s, const Level& Z_) {
    a.beta = add(Z_, a.beta, mul(Z_, lift(Z_, K, s), b.beta));
    for (auto& [k, c] : b.coef) {
      auto it = a.coef.find(k);
      Elem v = mul(K, c, s);
      if (it == a.coef.end())
        a.coef[k] = v;
      else
        it->second = add(K, it->second, v);
    }
  }

  Lin key_lin(const std::string& s) const { return Lin{zero(*zl), {{s, one(K)}}}; }

  Lin symbol_lin(const std::string& s) const {
    int i = P.index(s);
    if (lin[i]) return *lin[i];
    if (P.gens[i].kind == BlurredGen::Defined) throw std::invalid_argument(s + " is not linear in the generators");
    return key_lin(s);
  }

  Lin linear(const Expr& e) const {
    if (is_base(e)) return Lin{modc(base_elem(e)), {}};
    switch (e->kind) {
      case ExprKind::Var: return symbol_lin(e->name);
      case ExprKind::Add: {
        Lin s{zero(*zl), {}};
        for (auto& a : e->args) add_to(K, s, linear(a), one(K), *zl);
        return s;
      }
      case ExprKind::Mul: {
        Elem c = one(K);
        Expr sym;
        for (auto& a : e->args) {
          if (is_base(a) && !depends_on(a, "z")) {
            c = mul(K, c, expr_to_const(a, P.field));
          } else if (!sym) {
            sym = a;
          } else {
            throw std::invalid_argument(print(e) + " is not linear in the generators");
          }
        }
        Lin s{zero(*zl), {}};
        add_to(K, s, linear(sym), c, *zl);
        return s;
      }
      default: throw std::invalid_argument(print(e) + " is not linear in the generators");
    }
  }

  Mult symbol_mult(const std::string& s) const {
    int i = P.index(s);
    if (mult[i]) return *mult[i];
    if (P.gens[i].kind == BlurredGen::Defined) throw UnfactorableArgument(s + " is not multiplicative in the generators");
    return {{s, Q(1)}};
  }

  Mult multiplicative(const Expr& e) const {
    if (is_base(e)) {
      Elem b = base_elem(e);
      if (is_zero(*zl, b)) throw UnfactorableArgument("log of zero");
      Mult m;
      for (int side = 0; side < 2; ++side) {
        const Poly& p = side ? b.d : b.n;
        if (deg(p) <= 0) continue;
        Factorization f;
        try {
          f = factor(K, p);
        } catch (const FactorUnsupported& ex) {
          throw UnfactorableArgument(std::string("cannot factor ") + poly_string(K, p, "z") + ": " + ex.what());
        }
        for (auto& [fa, mu] : f.factors) m["(" + poly_string(K, fa, "z") + ")"] += side ? -mu : mu;
      }
      return m;
    }
    switch (e->kind) {
      case ExprKind::Var: return symbol_mult(e->name);
      case ExprKind::Mul: {
        Mult m;
        for (auto& a : e->args)
          for (auto& [k, v] : multiplicative(a)) m[k] += v;
        return m;
      }
      case ExprKind::Pow: {
        Mult m = multiplicative(e->args[0]);
        for (auto& [k, v] : m) v *= e->num;
        return m;
      }
      default:
        throw UnfactorableArgument("log argument " + print(e) +
                                   " is not a product of powers of base factors and earlier generators");
    }
  }

  // rational q with target = sum q_j vs_j, modulo constants
  std::optional<std::vector<Q>> solve_lin(const Lin& t, const std::vector<Lin>& vs) const {
    std::vector<Lin> all = vs;
    all.push_back(t);
    std::vector<std::vector<Q>> cols(all.size());
    std::vector<Elem> betas;
    for (auto& l : all) betas.push_back(l.beta);
    auto fb = flatten(*zl, betas);
    for (size_t j = 0; j < all.size(); ++j) cols[j] = fb[j];
    std::set<std::string> keys;
    for (auto& l : all)
      for (auto& [k, c] : l.coef) keys.insert(k);
    for (auto& k : keys) {
      std::vector<Elem> cs;
      for (auto& l : all) {
        auto it = l.coef.find(k);
        cs.push_back(it == l.coef.end() ? zero(K) : it->second);
      }
      auto fc = flatten(K, cs);
      for (size_t j = 0; j < all.size(); ++j) cols[j].insert(cols[j].end(), fc[j].begin(), fc[j].end());
    }
    return solve_cols(cols);
  }

  std::optional<std::vector<Q>> solve_mult(const Mult& t, const std::vector<Mult>& vs) const {
    std::set<std::string> keys;
    for (auto& [k, v] : t) keys.insert(k);
    for (auto& m : vs)
      for (auto& [k, v] : m) keys.insert(k);
    std::vector<std::vector<Q>> cols(vs.size() + 1);
    for (auto& k : keys)
      for (size_t j = 0; j <= vs.size(); ++j) {
        const Mult& m = j < vs.size() ? vs[j] : t;
        auto it = m.find(k);
        cols[j].push_back(it == m.end() ? Q(0) : it->second);
      }
    return solve_cols(cols);
  }

  // last column is the right-hand side
  static std::optional<std::vector<Q>> solve_cols(const std::vector<std::vector<Q>>& cols) {
    size_t n = cols.size() - 1, rows = cols.back().size();
    if (rows == 0) return std::vector<Q>(n, Q(0));
    std::vector<std::vector<Q>> A(rows, std::vector<Q>(n));
    std::vector<Q> b(rows);
    for (size_t r = 0; r < rows; ++r) {
      for (size_t j = 0; j < n; ++j) A[r][j] = cols[j][r];
      b[r] = cols[n][r];
    }
    if (n == 0) {
      for (auto& x : b)
        if (x != 0) return std::nullopt;
      return std::vector<Q>{};
    }
    return solve_rational(A, b);
  }

  void build(int i) {
    const BlurredGen& g = P.gens[i];
    if (g.kind == BlurredGen::FreeGen) return;
    if (g.kind == BlurredGen::Defined) {
      try {
        lin[i] = linear(g.arg);
      } catch (const std::exception&) {
      }
      try {
        mult[i] = multiplicative(g.arg);
      } catch (const std::exception&) {
      }
      return;
    }
    int j = static_cast<int>(pair_gen.size());
    pair_of[i] = j;
    pair_gen.push_back(i);
    std::optional<std::vector<Q>> q;
    Lin a;
    Mult m;
    if (g.kind == BlurredGen::NewExp) {
      try {
        a = linear(g.arg);
      } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument("exp argument of " + g.name + ": " + ex.what());
      }
      q = solve_lin(a, pa);
      if (q) {
        for (size_t k = 0; k < pm.size(); ++k)
          for (auto& [key, v] : pm[k]) m[key] += (*q)[k] * v;
        mult[i] = m;
      } else {
        m = {{g.name, Q(1)}};
      }
    } else {
      m = multiplicative(g.arg);
      q = solve_mult(m, pm);
      if (q) {
        a = Lin{zero(*zl), {}};
        for (size_t k = 0; k < pa.size(); ++k) add_to(K, a, pa[k], from_q(K, (*q)[k]), *zl);
        lin[i] = a;
      } else {
        a = key_lin(g.name);
      }
    }
    for (auto it = m.begin(); it != m.end();) it = it->second == 0 ? m.erase(it) : std::next(it);
    pa.push_back(a);
    pm.push_back(m);
    if (q) {
      dep[i] = true;
      coef[i] = *q;
      std::vector<Q> row(P.pairs().size(), Q(0));
      for (size_t k = 0; k < q->size(); ++k) row[k] = -(*q)[k];
      row[j] = 1;
      relations.push_back(row);
    }
  }
};

// ---------------------------------------------------------------- generic points

using u64 = unsigned long long;
constexpr u64 kP = 2305843009213693951ULL;  // 2^61 - 1

u64 mulm(u64 a, u64 b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  u64 lo = static_cast<u64>(r & kP), hi = static_cast<u64>(r >> 61);
  u64 s = lo + hi;
  return s >= kP ? s - kP : s;
}
u64 addm(u64 a, u64 b) { return a + b >= kP ? a + b - kP : a + b; }
u64 subm(u64 a, u64 b) { return a >= b ? a - b : a + kP - b; }
u64 powm(u64 a, u64 e) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulm(r, a);
    a = mulm(a, a);
    e >>= 1;
  }
  return r;
}
u64 invm(u64 a) {
  if (a == 0) throw DivisionByZero();
  return powm(a, kP - 2);
}
u64 zmod(const Z& z) {
  Z r = z % Z(std::to_string(kP));
  if (r < 0) r += Z(std::to_string(kP));
  return r.get_ui();
}
u64 qmod(const Q& q) { return mulm(zmod(q.get_num()), invm(zmod(q.get_den()))); }

using Vec = std::vector<u64>;

// rank of rows (destroys)
int rank_mod(std::vector<Vec> A) {
  int r = 0;
  size_t n = A.empty() ? 0 : A[0].size();
  for (size_t c = 0; c < n && r < static_cast<int>(A.size()); ++c) {
    size_t p = r;
    while (p < A.size() && A[p][c] == 0) ++p;
    if (p == A.size()) continue;
    std::swap(A[p], A[r]);
    u64 iv = invm(A[r][c]);
    for (size_t i = r + 1; i < A.size(); ++i) {
      if (A[i][c] == 0) continue;
      u64 f = mulm(A[i][c], iv);
      for (size_t k = c; k < n; ++k) A[i][k] = subm(A[i][k], mulm(f, A[r][k]));
    }
    ++r;
  }
  return r;
}

// basis of {x : A x = 0} in reduced form, free variables set to unit vectors
std::vector<Vec> nullspace_mod(std::vector<Vec> A, size_t n) {
  std::vector<int> piv;
  size_t r = 0;
  for (size_t c = 0; c < n && r < A.size(); ++c) {
    size_t p = r;
    while (p < A.size() && A[p][c] == 0) ++p;
    if (p == A.size()) continue;
    std::swap(A[p], A[r]);
    u64 iv = invm(A[r][c]);
    for (auto& x : A[r]) x = mulm(x, iv);
    for (size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][c] == 0) continue;
      u64 f = A[i][c];
      for (size_t k = 0; k < n; ++k) A[i][k] = subm(A[i][k], mulm(f, A[r][k]));
    }
    piv.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<bool> isp(n, false);
  for (int c : piv) isp[c] = true;
  std::vector<Vec> out;
  for (size_t f = 0; f < n; ++f) {
    if (isp[f]) continue;
    Vec v(n, 0);
    v[f] = 1;
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = subm(0, A[i][f]);
    out.push_back(v);
  }
  return out;
}

std::optional<Q> reconstruct(u64 a) {
  // find r/s = a with |r|, s < sqrt(p/2)
  Z r0(std::to_string(kP)), r1(std::to_string(a)), s0 = 0, s1 = 1;
  Z bound = sqrt(r0 / 2);
  while (r1 > bound) {
    Z q = r0 / r1;
    Z r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = r1, r1 = r2, s0 = s1, s1 = s2;
  }
  if (s1 == 0 || abs(s1) > bound) return std::nullopt;
  Q out(r1, s1);
  out.canonicalize();
  return out;
}

struct Dual {
  u64 v = 0;
  Vec g;
};

}  // namespace

// ---------------------------------------------------------------- calculus

struct BlurredCalculus::Impl {
  BlurredPresentation P;
  Structure S;
  int atoms = 0;
  std::vector<int> atom_of;  // gen -> atom index or -1
  struct Point {
    std::map<std::string, u64> consts;
    u64 z = 0;
    std::vector<u64> val;
    std::vector<Vec> grad;
    std::vector<Vec> ga, gm;  // per pair
  };
  std::vector<Point> pts;
  std::vector<int> pair_gen;

  Impl(const BlurredPresentation& p, int npoints) : P(p), S(P) {
    pair_gen = S.pair_gen;
    atom_of.assign(P.gens.size(), -1);
    if (P.has_z) atoms = 1;
    for (size_t i = 0; i < P.gens.size(); ++i) {
      auto k = P.gens[i].kind;
      if (k == BlurredGen::FreeGen || ((k == BlurredGen::NewExp || k == BlurredGen::NewLog) && !S.dep[i]))
        atom_of[i] = atoms++;
    }
    std::mt19937_64 rng(0x5eed + P.gens.size());
    std::uniform_int_distribution<u64> U(2, kP - 1);
    for (int t = 0; t < npoints; ++t) {
      for (int attempt = 0;; ++attempt) {
        try {
          pts.push_back(make_point(rng, U));
          break;
        } catch (const DivisionByZero&) {
          if (attempt > 20) throw;
        }
      }
    }
  }

  Vec unit(int k) const {
    Vec v(atoms, 0);
    v[k] = 1;
    return v;
  }

  u64 cval(const Level& L, const Elem& e, const Point& pt) const {
    if (L.kind == LevelKind::Base) return qmod(e.q);
    if (L.kind != LevelKind::Trans) throw std::invalid_argument("only transcendental constants are supported");
    u64 x = L.gen == GenKind::Var ? pt.z : pt.consts.at(L.name);
    auto ev = [&](const Poly& p) {
      u64 acc = 0;
      for (int k = deg(p); k >= 0; --k) acc = addm(mulm(acc, x), cval(*L.base, p[k], pt));
      return acc;
    };
    return mulm(ev(e.n), invm(ev(e.d)));
  }

  Dual dual(const Expr& e, const Point& pt) const {
    Dual d;
    d.g.assign(atoms, 0);
    switch (e->kind) {
      case ExprKind::Num: d.v = qmod(e->num); return d;
      case ExprKind::Sym: d.v = pt.consts.at(e->name); return d;
      case ExprKind::Var: {
        if (e->name == "z") {
          d.v = pt.z;
          d.g = unit(0);
          return d;
        }
        int i = P.index(e->name);
        d.v = pt.val[i];
        d.g = pt.grad[i];
        return d;
      }
      case ExprKind::Add:
        for (auto& a : e->args) {
          Dual x = dual(a, pt);
          d.v = addm(d.v, x.v);
          for (int k = 0; k < atoms; ++k) d.g[k] = addm(d.g[k], x.g[k]);
        }
        return d;
      case ExprKind::Mul:
        d.v = 1;
        for (auto& a : e->args) {
          Dual x = dual(a, pt);
          for (int k = 0; k < atoms; ++k) d.g[k] = addm(mulm(d.g[k], x.v), mulm(d.v, x.g[k]));
          d.v = mulm(d.v, x.v);
        }
        return d;
      case ExprKind::Pow: {
        if (e->num.get_den() != 1) throw std::invalid_argument("fractional power " + print(e) + " outside a log argument");
        Dual b = dual(e->args[0], pt);
        long k = e->num.get_num().get_si();
        u64 base = k < 0 ? invm(b.v) : b.v;
        u64 kk = static_cast<u64>(k < 0 ? -k : k);
        d.v = powm(base, kk);
        // d(b^k) = k b^(k-1) db
        u64 f = mulm(qmod(Q(k)), mulm(d.v, invm(b.v)));
        for (int j = 0; j < atoms; ++j) d.g[j] = mulm(f, b.g[j]);
        return d;
      }
      default: throw std::invalid_argument(print(e) + ": declare exp/log subterms as generators");
    }
  }

  Vec dlog(const Expr& e, const Point& pt) const {
    if (e->kind == ExprKind::Mul) {
      Vec s(atoms, 0);
      for (auto& a : e->args) {
        Vec x = dlog(a, pt);
        for (int k = 0; k < atoms; ++k) s[k] = addm(s[k], x[k]);
      }
      return s;
    }
    if (e->kind == ExprKind::Pow) {
      Vec x = dlog(e->args[0], pt);
      u64 r = qmod(e->num);
      for (auto& v : x) v = mulm(v, r);
      return x;
    }
    Dual d = dual(e, pt);
    u64 iv = invm(d.v);
    for (auto& v : d.g) v = mulm(v, iv);
    return d.g;
  }

  Point make_point(std::mt19937_64& rng, std::uniform_int_distribution<u64>& U) const {
    Point pt;
    for (auto& L : P.field.chain())
      if (L->kind == LevelKind::Trans) pt.consts[L->name] = U(rng);
    pt.z = U(rng);
    size_t n = P.gens.size(), np = pair_gen.size();
    pt.val.assign(n, 0);
    pt.grad.assign(n, Vec(atoms, 0));
    pt.ga.assign(np, Vec());
    pt.gm.assign(np, Vec());
    for (size_t i = 0; i < n; ++i) {
      const BlurredGen& g = P.gens[i];
      int j = S.pair_of[i];
      if (atom_of[i] >= 0) {
        pt.val[i] = U(rng);
        pt.grad[i] = unit(atom_of[i]);
      }
      auto comb = [&](const std::vector<Vec>& vs) {
        Vec s(atoms, 0);
        for (size_t k = 0; k < S.coef[i].size(); ++k) {
          u64 c = qmod(S.coef[i][k]);
          for (int a = 0; a < atoms; ++a) s[a] = addm(s[a], mulm(c, vs[k][a]));
        }
        return s;
      };
      switch (g.kind) {
        case BlurredGen::FreeGen: break;
        case BlurredGen::Defined: {
          Dual d = dual(g.arg, pt);
          pt.val[i] = d.v;
          pt.grad[i] = d.g;
          break;
        }
        case BlurredGen::NewExp: {
          pt.ga[j] = dual(g.arg, pt).g;
          if (S.dep[i]) {
            pt.gm[j] = comb(pt.gm);
            pt.val[i] = U(rng);
            for (int a = 0; a < atoms; ++a) pt.grad[i][a] = mulm(pt.val[i], pt.gm[j][a]);
          } else {
            pt.gm[j] = pt.grad[i];
            u64 iv = invm(pt.val[i]);
            for (auto& v : pt.gm[j]) v = mulm(v, iv);
          }
          break;
        }
        case BlurredGen::NewLog: {
          pt.gm[j] = dlog(g.arg, pt);
          if (S.dep[i]) {
            pt.ga[j] = comb(pt.ga);
            pt.val[i] = U(rng);
            pt.grad[i] = pt.ga[j];
          } else {
            pt.ga[j] = pt.grad[i];
          }
          break;
        }
      }
    }
    return pt;
  }

  std::vector<Vec> span_rows(const Point& pt, const std::vector<int>& X) const {
    std::vector<Vec> rows;
    if (P.has_z) rows.push_back(unit(0));
    for (int s : X) rows.push_back(pt.grad[s]);
    return rows;
  }

  int td(const std::vector<int>& X) const {
    int best = 0;
    for (auto& pt : pts) best = std::max(best, rank_mod(span_rows(pt, X)));
    return best;
  }

  std::vector<Vec> constraints(const std::vector<int>& X) const {
    std::vector<Vec> C;
    size_t np = pair_gen.size();
    for (auto& pt : pts) {
      auto rows = span_rows(pt, X);
      auto N = nullspace_mod(rows, atoms);
      for (auto& nv : N) {
        Vec ra(np, 0), rm(np, 0);
        for (size_t j = 0; j < np; ++j)
          for (int a = 0; a < atoms; ++a) {
            ra[j] = addm(ra[j], mulm(nv[a], pt.ga[j][a]));
            rm[j] = addm(rm[j], mulm(nv[a], pt.gm[j][a]));
          }
        C.push_back(ra);
        C.push_back(rm);
      }
    }
    return C;
  }

  int pair_dim_meet(const std::vector<int>& A, const std::vector<int>& B) const {
    int np = static_cast<int>(pair_gen.size());
    if (np == 0) return 0;
    auto C = constraints(A);
    auto D = constraints(B);
    C.insert(C.end(), D.begin(), D.end());
    if (C.empty()) return np;
    return np - rank_mod(C);
  }

  int pair_dim(const std::vector<int>& X) const {
    int np = static_cast<int>(pair_gen.size());
    if (np == 0) return 0;
    auto C = constraints(X);
    if (C.empty()) return np;
    return np - rank_mod(C);
  }

  std::vector<std::vector<Q>> pair_space(const std::vector<int>& X) const {
    size_t np = pair_gen.size();
    std::vector<std::vector<Q>> out;
    if (np == 0) return out;
    auto N = nullspace_mod(constraints(X), np);
    for (auto& v : N) {
      std::vector<Q> r;
      for (u64 x : v) {
        auto q = reconstruct(x);
        if (!q) throw std::runtime_error("pair space reconstruction failed");
        r.push_back(*q);
      }
      out.push_back(r);
    }
    return out;
  }
};

BlurredCalculus::BlurredCalculus(const BlurredPresentation& P, int points) : impl_(new Impl(P, points)) {}
BlurredCalculus::~BlurredCalculus() { delete impl_; }
const BlurredPresentation& BlurredCalculus::presentation() const { return impl_->P; }
int BlurredCalculus::td(const std::vector<int>& S) const { return impl_->td(S); }
int BlurredCalculus::pair_dim(const std::vector<int>& S) const { return impl_->pair_dim(S); }
std::vector<std::vector<Q>> BlurredCalculus::pair_space(const std::vector<int>& S) const { return impl_->pair_space(S); }
const std::vector<bool>& BlurredCalculus::dependent() const { return impl_->S.dep; }

int BlurredCalculus::delta(const std::vector<int>& M, const std::vector<int>& k) const {
  std::vector<int> U = k;
  for (int m : M)
    if (std::find(U.begin(), U.end(), m) == U.end()) U.push_back(m);
  return (td(U) - td(k)) - (pair_dim(U) - pair_dim(k));
}

int BlurredCalculus::delta_meet(const std::vector<int>& M, const std::vector<int>& N, const std::vector<int>& k) const {
  auto join = [&](const std::vector<int>& X) {
    std::vector<int> U = k;
    for (int m : X)
      if (std::find(U.begin(), U.end(), m) == U.end()) U.push_back(m);
    return U;
  };
  std::vector<int> A = join(M), B = join(N), AB = join(A);
  for (int b : B)
    if (std::find(AB.begin(), AB.end(), b) == AB.end()) AB.push_back(b);
  int td_meet = td(A) + td(B) - td(AB);
  return (td_meet - td(k)) - (impl_->pair_dim_meet(A, B) - pair_dim(k));
}

RelationLattice relation_lattice(const BlurredPresentation& P) {
  Structure S(P);
  RelationLattice L;
  L.columns = S.pair_gen;
  std::vector<std::vector<Z>> rows;
  for (auto& r : S.relations) rows.push_back(integer_row(r));
  L.rows = saturate(rows);
  for (auto& r : L.rows) {
    // first nonzero entry positive
    for (auto& x : r)
      if (x != 0) {
        if (x < 0)
          for (auto& y : r) y = -y;
        break;
      }
  }
  L.invariants = smith_normal_form(L.rows);
  L.saturated = std::all_of(L.invariants.begin(), L.invariants.end(), [](const Z& d) { return d == 1; });
  return L;
}

int predim(const BlurredPresentation& P) {
  BlurredCalculus C(P);
  std::vector<int> all;
  for (size_t i = 0; i < P.gens.size(); ++i) all.push_back(static_cast<int>(i));
  return C.delta(all, P.cut);
}

namespace {

void check_size(const BlurredPresentation& P, int max_gens) {
  if (static_cast<int>(P.gens.size()) > max_gens)
    throw TooManyGenerators(std::to_string(P.gens.size()) + " generators exceed the search bound " + std::to_string(max_gens));
}

std::string pair_line(const BlurredPresentation& P, const std::vector<int>& pair_gen, const std::vector<Z>& r, int& fresh) {
  std::vector<int> nz;
  for (size_t j = 0; j < r.size(); ++j)
    if (r[j] != 0) nz.push_back(static_cast<int>(j));
  if (nz.size() == 1 && abs(r[nz[0]]) == 1) return format_gen(P, pair_gen[nz[0]]);
  bool logs = true, exps = true;
  std::vector<Expr> ms, as;
  for (int j : nz) {
    const BlurredGen& g = P.gens[pair_gen[j]];
    Q c(r[j]);
    bool isexp = g.kind == BlurredGen::NewExp;
    logs = logs && !isexp;
    exps = exps && isexp;
    Expr m = isexp ? e_var(g.name) : g.arg;
    Expr a = isexp ? g.arg : e_var(g.name);
    ms.push_back(e_pow(m, c));
    as.push_back(e_mul(e_num(c), a));
  }
  std::string name = "h" + std::to_string(++fresh);
  if (logs) return "gen " + name + " = log(" + print(e_mul(ms)) + ")";
  if (exps) return "gen " + name + " = exp(" + print(e_add(as)) + ")";
  return "pair " + name + " = (" + print(e_mul(ms)) + ", " + print(e_add(as)) + ")";
}

}  // namespace

HullResult hull(const BlurredPresentation& P, const std::vector<int>& target, int max_gens) {
  check_size(P, max_gens);
  if (target.empty()) throw std::invalid_argument("hull target is empty");
  BlurredCalculus C(P);
  std::vector<int> others;
  for (size_t i = 0; i < P.gens.size(); ++i)
    if (std::find(target.begin(), target.end(), static_cast<int>(i)) == target.end()) others.push_back(static_cast<int>(i));
  int td0 = C.td({}), pd0 = C.pair_dim({});
  struct Best {
    int delta, td, size;
    unsigned long mask;
  };
  std::optional<Best> best;
  for (unsigned long mask = 0; mask < (1UL << others.size()); ++mask) {
    std::vector<int> S = target;
    for (size_t k = 0; k < others.size(); ++k)
      if (mask >> k & 1) S.push_back(others[k]);
    int t = C.td(S) - td0;
    int d = t - (C.pair_dim(S) - pd0);
    Best b{d, t, __builtin_popcountl(mask), mask};
    if (!best || std::tie(b.delta, b.td, b.size) < std::tie(best->delta, best->td, best->size)) best = b;
  }
  HullResult H;
  H.gens = target;
  for (size_t k = 0; k < others.size(); ++k)
    if (best->mask >> k & 1) H.gens.push_back(others[k]);
  H.td = best->td;
  H.delta = best->delta;
  std::vector<std::vector<Z>> rows;
  for (auto& r : C.pair_space(H.gens)) rows.push_back(integer_row(r));
  H.pair_basis = saturate(rows);
  std::vector<int> pair_gen = P.pairs();
  int fresh = 0;
  H.lines.push_back(P.has_z ? "base z" : "base const");
  for (auto& r : H.pair_basis) H.lines.push_back(pair_line(P, pair_gen, r, fresh));
  // hull elements transcendental over the pair coordinates
  std::vector<int> basis;
  for (int s : H.gens) {
    std::vector<int> with = basis;
    with.push_back(s);
    if (C.td(with) > C.td(basis)) basis = with;
  }
  int pair_td = 0;
  {
    // td contributed by the pairs equals the rank of the pair space modulo relations
    pair_td = C.pair_dim(H.gens) - pd0;
  }
  int extra = H.td - pair_td;
  for (int s : H.gens) {
    if (extra <= 0) break;
    if (P.gens[s].kind == BlurredGen::FreeGen || P.gens[s].kind == BlurredGen::Defined) {
      H.lines.push_back(format_gen(P, s) + "  # transcendental over the pairs");
      --extra;
    }
  }
  return H;
}

int etd(const BlurredPresentation& P, const std::vector<int>& target, int max_gens) {
  return hull(P, target, max_gens).delta;
}

bool self_sufficient(const BlurredPresentation& P, int max_gens) {
  check_size(P, max_gens);
  BlurredCalculus C(P);
  std::vector<int> others;
  for (size_t i = 0; i < P.gens.size(); ++i)
    if (std::find(P.cut.begin(), P.cut.end(), static_cast<int>(i)) == P.cut.end()) others.push_back(static_cast<int>(i));
  for (unsigned long mask = 1; mask < (1UL << others.size()); ++mask) {
    std::vector<int> M;
    for (size_t k = 0; k < others.size(); ++k)
      if (mask >> k & 1) M.push_back(others[k]);
    if (C.delta(M, P.cut) < 0) return false;
  }
  return true;
}

}  // namespace finterm
