#include "finterm/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "finterm/factor.hpp"

namespace finterm {

// ---------------------------------------------------------------- constructors

namespace {

std::shared_ptr<ExprNode> node(ExprKind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

}  // namespace

Expr e_num(const Q& q) {
  auto n = node(ExprKind::Num);
  n->num = q;
  n->num.canonicalize();
  return n;
}

Expr e_sym(const std::string& s) {
  auto n = node(ExprKind::Sym);
  n->name = s;
  return n;
}

Expr e_var(const std::string& v) {
  auto n = node(ExprKind::Var);
  n->name = v;
  return n;
}

Expr e_add_raw(std::vector<Expr> xs) {
  auto n = node(ExprKind::Add);
  n->args = std::move(xs);
  return n;
}

Expr e_mul_raw(std::vector<Expr> xs) {
  auto n = node(ExprKind::Mul);
  n->args = std::move(xs);
  return n;
}

Expr e_pow_raw(Expr b, const Q& r) {
  auto n = node(ExprKind::Pow);
  n->args = {std::move(b)};
  n->num = r;
  return n;
}

Expr e_exp(Expr a) {
  auto n = node(ExprKind::Exp);
  n->args = {std::move(a)};
  return n;
}

Expr e_log(Expr a) {
  auto n = node(ExprKind::Log);
  n->args = {std::move(a)};
  return n;
}

Expr e_inv(const std::string& name, Expr arg, Expr def, const std::string& def_var) {
  auto n = node(ExprKind::Inv);
  n->name = name;
  n->args = {std::move(arg)};
  n->def = std::move(def);
  n->def_var = def_var;
  return n;
}

bool is_num(const Expr& e, const Q& q) { return e->kind == ExprKind::Num && e->num == q; }

bool expr_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Num:
      return a->num == b->num;
    case ExprKind::Sym:
    case ExprKind::Var:
      return a->name == b->name;
    case ExprKind::Pow:
      if (a->num != b->num) return false;
      break;
    case ExprKind::Inv:
      if (a->name != b->name) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

// split a term into rational coefficient and the rest
std::pair<Q, Expr> split_coeff(const Expr& e) {
  if (e->kind == ExprKind::Num) return {e->num, nullptr};
  if (e->kind == ExprKind::Mul && !e->args.empty() && e->args[0]->kind == ExprKind::Num) {
    std::vector<Expr> rest(e->args.begin() + 1, e->args.end());
    if (rest.size() == 1) return {e->args[0]->num, rest[0]};
    return {e->args[0]->num, e_mul_raw(rest)};
  }
  return {Q(1), e};
}

std::pair<Expr, Q> split_pow(const Expr& e) {
  if (e->kind == ExprKind::Pow) return {e->args[0], e->num};
  return {e, Q(1)};
}

bool exact_root(const Q& q, const Z& k, Q& out) {
  if (q < 0 && k % 2 == 0) return false;
  Z n = abs(q.get_num()), d = q.get_den();
  unsigned long kk = k.get_ui();
  Z rn, rd;
  if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), kk)) return false;
  if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), kk)) return false;
  out = Q(q < 0 ? Z(-rn) : rn, rd);
  return true;
}

Q qpow(const Q& b, long k) {
  Q r = 1;
  Q base = k < 0 ? Q(1) / b : b;
  for (long i = 0; i < std::labs(k); ++i) r *= base;
  return r;
}

}  // namespace

Expr e_pow(Expr b, const Q& r) {
  if (r == 0) return e_num(1);
  if (r == 1) return b;
  if (b->kind == ExprKind::Num) {
    if (b->num == 0) {
      if (r < 0) throw DivisionByZero();
      return b;
    }
    if (b->num == 1) return b;
    if (r.get_den() == 1) return e_num(qpow(b->num, r.get_num().get_si()));
    Q root;
    if (exact_root(b->num, r.get_den(), root)) return e_num(qpow(root, r.get_num().get_si()));
    return e_pow_raw(b, r);
  }
  if (r.get_den() == 1) {
    if (b->kind == ExprKind::Pow) {
      Q s = b->num * r;
      if (s == 1) return b->args[0];
      return e_pow_raw(b->args[0], s);
    }
    if (b->kind == ExprKind::Mul) {
      std::vector<Expr> fs;
      for (auto& f : b->args) fs.push_back(e_pow(f, r));
      return e_mul(fs);
    }
  }
  return e_pow_raw(b, r);
}

Expr e_mul(std::vector<Expr> xs) {
  Q c = 1;
  std::vector<std::pair<Expr, Q>> fs;
  std::function<void(const Expr&)> push = [&](const Expr& e) {
    if (e->kind == ExprKind::Num) {
      c *= e->num;
      return;
    }
    if (e->kind == ExprKind::Mul) {
      for (auto& a : e->args) push(a);
      return;
    }
    auto [b, r] = split_pow(e);
    for (auto& f : fs)
      if (expr_equal(f.first, b)) {
        f.second += r;
        return;
      }
    fs.push_back({b, r});
  };
  for (auto& x : xs) push(x);
  if (c == 0) return e_num(0);
  std::vector<Expr> out;
  std::vector<Expr> rest;
  for (auto& [b, r] : fs) {
    if (r == 0) continue;
    Expr p = e_pow(b, r);
    if (p->kind == ExprKind::Num) {
      c *= p->num;
      continue;
    }
    rest.push_back(p);
  }
  if (c != 1 && rest.size() == 1 && rest[0]->kind == ExprKind::Add) {
    std::vector<Expr> ts;
    for (auto& t : rest[0]->args) ts.push_back(e_mul(e_num(c), t));
    return e_add(ts);
  }
  if (c != 1 || rest.empty()) out.push_back(e_num(c));
  for (auto& r : rest)
    if (!(r->kind == ExprKind::Pow && r->num < 0)) out.push_back(r);
  for (auto& r : rest)
    if (r->kind == ExprKind::Pow && r->num < 0) out.push_back(r);
  if (out.size() == 1) return out[0];
  return e_mul_raw(out);
}

Expr e_add(std::vector<Expr> xs) {
  std::vector<std::pair<Q, Expr>> terms;
  Q cst = 0;
  std::function<void(const Expr&)> push = [&](const Expr& e) {
    if (e->kind == ExprKind::Add) {
      for (auto& a : e->args) push(a);
      return;
    }
    auto [c, r] = split_coeff(e);
    if (!r) {
      cst += c;
      return;
    }
    for (auto& t : terms)
      if (expr_equal(t.second, r)) {
        t.first += c;
        return;
      }
    terms.push_back({c, r});
  };
  for (auto& x : xs) push(x);
  std::vector<Expr> out;
  for (auto& [c, r] : terms) {
    if (c == 0) continue;
    out.push_back(c == 1 ? r : e_mul({e_num(c), r}));
  }
  if (cst != 0 || out.empty()) out.push_back(e_num(cst));
  if (out.size() == 1) return out[0];
  return e_add_raw(out);
}

Expr e_neg(Expr a) { return e_mul({e_num(-1), std::move(a)}); }
Expr e_sub(Expr a, Expr b) { return e_add({std::move(a), e_neg(std::move(b))}); }
Expr e_div(Expr a, Expr b) { return e_mul({std::move(a), e_pow(std::move(b), Q(-1))}); }
Expr e_add(Expr a, Expr b) { return e_add(std::vector<Expr>{std::move(a), std::move(b)}); }
Expr e_mul(Expr a, Expr b) { return e_mul(std::vector<Expr>{std::move(a), std::move(b)}); }

bool contains_inverse(const Expr& e) {
  if (e->kind == ExprKind::Inv) return true;
  for (auto& a : e->args)
    if (contains_inverse(a)) return true;
  return false;
}

bool depends_on(const Expr& e, const std::string& var) {
  if (e->kind == ExprKind::Var) return e->name == var;
  for (auto& a : e->args)
    if (depends_on(a, var)) return true;
  return false;
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  switch (e->kind) {
    case ExprKind::Add:
      return e_add(std::move(args));
    case ExprKind::Mul:
      return e_mul(std::move(args));
    case ExprKind::Pow:
      return e_pow(args[0], e->num);
    case ExprKind::Exp:
      return e_exp(args[0]);
    case ExprKind::Log:
      return e_log(args[0]);
    case ExprKind::Inv:
      return e_inv(e->name, args[0], e->def, e->def_var);
    default:
      return e;
  }
}

}  // namespace

Expr substitute(const Expr& e, const std::string& var, const Expr& by) {
  if (e->kind == ExprKind::Var) return e->name == var ? by : e;
  if (e->args.empty()) return e;
  std::vector<Expr> as;
  for (auto& a : e->args) as.push_back(substitute(a, var, by));
  return rebuild(e, std::move(as));
}

Expr substitute_inverse(const Expr& e, const std::string& name, const std::function<Expr(const Expr&)>& f) {
  if (e->args.empty()) return e;
  std::vector<Expr> as;
  for (auto& a : e->args) as.push_back(substitute_inverse(a, name, f));
  if (e->kind == ExprKind::Inv && e->name == name) return f(as[0]);
  return rebuild(e, std::move(as));
}

// ---------------------------------------------------------------- printing

namespace {

int prec(const Expr& e) {
  switch (e->kind) {
    case ExprKind::Num:
      if (e->num < 0) return 2;
      return e->num.get_den() == 1 ? 4 : 2;
    case ExprKind::Add:
      return 1;
    case ExprKind::Mul:
      return 2;
    case ExprKind::Pow:
      if (e->num < 0) return 2;
      if (e->num == Q(1, 2)) return 4;
      return 3;
    default:
      return 4;
  }
}

std::string pr(const Expr& e);

std::string wrap(const Expr& e, int min_prec) {
  std::string s = pr(e);
  if (prec(e) < min_prec) return "(" + s + ")";
  return s;
}

std::string qstr(const Q& q) { return q.get_str(); }

// base^r with r > 0
std::string pos_pow(const Expr& b, const Q& r) {
  if (r == 1) return wrap(b, 3);
  if (r == Q(1, 2)) return "sqrt(" + pr(b) + ")";
  std::string bs = wrap(b, 4);
  if (r.get_den() == 1) return bs + "^" + qstr(r);
  return bs + "^(" + qstr(r) + ")";
}

bool negative_term(const Expr& e) {
  if (e->kind == ExprKind::Num) return e->num < 0;
  if (e->kind == ExprKind::Mul && !e->args.empty() && e->args[0]->kind == ExprKind::Num) return e->args[0]->num < 0;
  return false;
}

std::string pr_mul(const std::vector<Expr>& args) {
  Q c = 1;
  size_t start = 0;
  if (!args.empty() && args[0]->kind == ExprKind::Num) {
    c = args[0]->num;
    start = 1;
  }
  std::vector<std::string> nums, dens;
  for (size_t i = start; i < args.size(); ++i) {
    const Expr& f = args[i];
    if (f->kind == ExprKind::Pow && f->num < 0) {
      std::string s = pos_pow(f->args[0], -f->num);
      if (-f->num == 1 && prec(f->args[0]) < 3) s = "(" + pr(f->args[0]) + ")";
      dens.push_back(s);
    } else if (f->kind == ExprKind::Num) {
      nums.push_back("(" + pr(f) + ")");
    } else {
      nums.push_back(wrap(f, 3));
    }
  }
  std::string out = c < 0 ? "-" : "";
  Z p = abs(c.get_num()), q = c.get_den();
  std::vector<std::string> ns;
  if (p != 1 || nums.empty()) ns.push_back(p.get_str());
  for (auto& s : nums) ns.push_back(s);
  for (size_t i = 0; i < ns.size(); ++i) out += (i ? "*" : "") + ns[i];
  if (q != 1) out += "/" + q.get_str();
  for (auto& d : dens) out += "/" + d;
  return out;
}

std::string pr(const Expr& e) {
  switch (e->kind) {
    case ExprKind::Num:
      return qstr(e->num);
    case ExprKind::Sym:
    case ExprKind::Var:
      return e->name;
    case ExprKind::Exp:
      return "exp(" + pr(e->args[0]) + ")";
    case ExprKind::Log:
      return "log(" + pr(e->args[0]) + ")";
    case ExprKind::Inv:
      return e->name + "(" + pr(e->args[0]) + ")";
    case ExprKind::Pow:
      if (e->num < 0) return pr_mul({e});
      return pos_pow(e->args[0], e->num);
    case ExprKind::Mul:
      return pr_mul(e->args);
    case ExprKind::Add: {
      std::string out;
      for (size_t i = 0; i < e->args.size(); ++i) {
        const Expr& t = e->args[i];
        if (i == 0) {
          out = wrap(t, 2);
          continue;
        }
        if (negative_term(t)) {
          Expr n = t->kind == ExprKind::Num ? e_num(-t->num) : nullptr;
          if (!n) {
            std::vector<Expr> a = t->args;
            Q c = -a[0]->num;
            if (c == 1 && a.size() > 1)
              a.erase(a.begin());
            else
              a[0] = e_num(c);
            n = a.size() == 1 ? a[0] : e_mul_raw(a);
          }
          out += " - " + wrap(n, 2);
        } else {
          out += " + " + wrap(t, 2);
        }
      }
      return out;
    }
  }
  return "?";
}

}  // namespace

std::string print(const Expr& e) { return pr(e); }

nlohmann::json to_json(const Expr& e) {
  using nlohmann::json;
  switch (e->kind) {
    case ExprKind::Num:
      return json{{"op", "num"}, {"value", e->num.get_str()}};
    case ExprKind::Sym:
      return json{{"op", "const"}, {"name", e->name}};
    case ExprKind::Var:
      return json{{"op", "var"}, {"name", e->name}};
    case ExprKind::Add:
    case ExprKind::Mul: {
      json a = json::array();
      for (auto& x : e->args) a.push_back(to_json(x));
      return json{{"op", e->kind == ExprKind::Add ? "add" : "mul"}, {"args", a}};
    }
    case ExprKind::Pow:
      return json{{"op", "pow"}, {"base", to_json(e->args[0])}, {"exp", e->num.get_str()}};
    case ExprKind::Exp:
      return json{{"op", "exp"}, {"arg", to_json(e->args[0])}};
    case ExprKind::Log:
      return json{{"op", "log"}, {"arg", to_json(e->args[0])}};
    case ExprKind::Inv:
      return json{{"op", "inverse"}, {"name", e->name}, {"arg", to_json(e->args[0])}};
  }
  return json();
}

// ---------------------------------------------------------------- parsing

ParseError::ParseError(Kind k, ParseDiagnostics d)
    : std::runtime_error(d.message), kind(k), diag(std::move(d)) {}

std::string ParseError::caret(const std::string& input) const {
  std::ostringstream os;
  os << (kind == Syntax ? "syntax error" : "unknown symbol") << " at offset " << diag.position << ": "
     << diag.message;
  if (!diag.expected.empty()) {
    os << " (expected";
    bool first = true;
    for (auto& x : diag.expected) {
      os << (first ? " " : ", ") << "\"" << x << "\"";
      first = false;
    }
    os << ")";
  }
  os << "\n  " << input << "\n  " << std::string(diag.position, ' ') << "^";
  return os.str();
}

namespace {

const std::set<std::string> kFunctions = {"exp", "log", "ln", "sqrt", "sin", "cos", "tan"};

struct Parser {
  const std::string& s;
  const ConstField& field;
  const ParseOptions& opt;
  size_t pos = 0;

  void ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected, size_t at) {
    throw ParseError(ParseError::Syntax, ParseDiagnostics{at, msg, std::move(expected)});
  }

  bool peek(char c) {
    ws();
    return pos < s.size() && s[pos] == c;
  }

  void expect(char c) {
    ws();
    if (pos >= s.size() || s[pos] != c) {
      std::string got = pos >= s.size() ? "end of input" : std::string("'") + s[pos] + "'";
      fail("expected '" + std::string(1, c) + "' but found " + got, {std::string(1, c)}, pos);
    }
    ++pos;
  }

  static Expr negate(const Expr& e) {
    if (e->kind == ExprKind::Num) return e_num(-e->num);
    if (e->kind == ExprKind::Mul && !e->args.empty() && e->args[0]->kind == ExprKind::Num) {
      std::vector<Expr> a = e->args;
      Q c = -a[0]->num;
      if (c == 1)
        a.erase(a.begin());
      else
        a[0] = e_num(c);
      return a.size() == 1 ? a[0] : e_mul_raw(a);
    }
    return e_mul_raw({e_num(-1), e});
  }

  static Expr invert(const Expr& e) {
    if (e->kind == ExprKind::Num) {
      if (e->num == 0) throw DivisionByZero();
      return e_num(1 / e->num);
    }
    if (e->kind == ExprKind::Pow) return e_pow_raw(e->args[0], -e->num);
    return e_pow_raw(e, Q(-1));
  }

  static Expr product(const std::vector<Expr>& fs) {
    Q c = 1;
    std::vector<Expr> rest, dens;
    std::function<void(const Expr&)> push = [&](const Expr& f) {
      if (f->kind == ExprKind::Num)
        c *= f->num;
      else if (f->kind == ExprKind::Mul)
        for (auto& g : f->args) push(g);
      else if (f->kind == ExprKind::Pow && f->num < 0)
        dens.push_back(f);
      else
        rest.push_back(f);
    };
    for (auto& f : fs) push(f);
    for (auto& d : dens) rest.push_back(d);
    if (rest.empty()) return e_num(c);
    if (c == 1 && rest.size() == 1) return rest[0];
    std::vector<Expr> out;
    if (c != 1) out.push_back(e_num(c));
    for (auto& r : rest) out.push_back(r);
    if (out.size() == 1) return out[0];
    return e_mul_raw(out);
  }

  static Expr sum(const std::vector<Expr>& ts) {
    Q c = 0;
    int cpos = -1;
    std::vector<Expr> out;
    for (auto& t : ts) {
      if (t->kind == ExprKind::Num) {
        if (cpos < 0) {
          cpos = static_cast<int>(out.size());
          out.push_back(t);
        }
        c += t->num;
      } else {
        out.push_back(t);
      }
    }
    if (cpos >= 0) {
      if (c == 0 && out.size() > 1)
        out.erase(out.begin() + cpos);
      else
        out[cpos] = e_num(c);
    }
    if (out.size() == 1) return out[0];
    return e_add_raw(out);
  }

  Expr expr() {
    std::vector<Expr> terms;
    terms.push_back(term());
    for (;;) {
      ws();
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        char op = s[pos++];
        Expr t = term();
        terms.push_back(op == '+' ? t : negate(t));
      } else {
        break;
      }
    }
    return sum(terms);
  }

  Expr term() {
    std::vector<Expr> fs;
    fs.push_back(factor());
    for (;;) {
      ws();
      if (pos < s.size() && (s[pos] == '*' || s[pos] == '/')) {
        char op = s[pos++];
        Expr f = factor();
        fs.push_back(op == '*' ? f : invert(f));
      } else {
        break;
      }
    }
    return product(fs);
  }

  Expr factor() {
    ws();
    if (pos < s.size() && s[pos] == '-') {
      ++pos;
      return negate(factor());
    }
    if (pos < s.size() && s[pos] == '+') {
      ++pos;
      return factor();
    }
    Expr a = atom();
    ws();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      Q r = exponent();
      if (a->kind == ExprKind::Num) return e_pow(a, r);
      if (r == 1) return a;
      return e_pow_raw(a, r);
    }
    return a;
  }

  Q exponent() {
    ws();
    size_t at = pos;
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      Expr e = expr();
      expect(')');
      if (e->kind != ExprKind::Num) fail("exponent must be a rational number", {"rational"}, at);
      return e->num;
    }
    bool negsign = false;
    if (pos < s.size() && s[pos] == '-') {
      negsign = true;
      ++pos;
      ws();
    }
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("exponent must be a rational number", {"rational"}, pos);
    Q v = number();
    return negsign ? Q(-v) : v;
  }

  Q number() {
    size_t st = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    Z ip(s.substr(st, pos - st));
    Q v(ip);
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      size_t fs = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos > fs) {
        Z fr(s.substr(fs, pos - fs));
        Z scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, pos - fs);
        Q f(fr, scale);
        f.canonicalize();
        v += f;
      }
    }
    v.canonicalize();
    return v;
  }

  Expr imaginary_unit(size_t at) {
    for (auto& L : field.chain()) {
      if (L->kind != LevelKind::Alg || L->base->kind != LevelKind::Base) continue;
      const Poly& m = L->minpoly;
      if (m.size() == 3 && m[0].q == 1 && m[1].q == 0 && m[2].q == 1) return e_sym(L->name);
    }
    fail("trigonometric functions need i (a root of x^2+1) in the constant field", {"exp", "log"}, at);
  }

  Expr call(const std::string& f, size_t at) {
    expect('(');
    Expr a = expr();
    expect(')');
    if (f == "exp") return e_exp(a);
    if (f == "log" || f == "ln") return e_log(a);
    if (f == "sqrt") {
      if (a->kind == ExprKind::Num) return e_pow(a, Q(1, 2));
      return e_pow_raw(a, Q(1, 2));
    }
    if (f == "sin" || f == "cos" || f == "tan") {
      Expr i = imaginary_unit(at);
      Expr ep = e_exp(e_mul_raw({i, a}));
      Expr em = e_exp(negate(e_mul_raw({i, a})));
      Expr s = e_mul_raw({e_add_raw({ep, negate(em)}), e_pow_raw(e_mul_raw({e_num(2), i}), Q(-1))});
      Expr c = e_mul_raw({e_num(Q(1, 2)), e_add_raw({ep, em})});
      if (f == "sin") return s;
      if (f == "cos") return c;
      return e_mul_raw({e_add_raw({ep, negate(em)}), e_pow_raw(e_mul_raw({i, e_add_raw({ep, em})}), Q(-1))});
    }
    for (auto& d : opt.inverses)
      if (d.name == f) return e_inv(d.name, a, d.def, d.var);
    fail("unknown function " + f, {"exp", "log", "sqrt"}, at);
  }

  Expr atom() {
    ws();
    if (pos >= s.size()) fail("unexpected end of input", {"number", "symbol", "("}, pos);
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return e_num(number());
    if (c == '(') {
      ++pos;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t at = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      std::string id = s.substr(at, pos - at);
      bool is_inverse = false;
      for (auto& d : opt.inverses)
        if (d.name == id) is_inverse = true;
      if (kFunctions.count(id) || is_inverse) return call(id, at);
      for (auto& v : opt.vars)
        if (v == id) return e_var(id);
      if (field.find(id)) return e_sym(id);
      throw ParseError(ParseError::UnknownSymbol,
                       ParseDiagnostics{at, "unknown symbol '" + id + "'", {"variable", "declared constant"}});
    }
    fail(std::string("unexpected character '") + c + "'", {"number", "symbol", "("}, pos);
  }
};

}  // namespace

Expr parse(const std::string& text, const ConstField& field, const ParseOptions& opt) {
  Parser p{text, field, opt};
  Expr e = p.expr();
  p.ws();
  if (p.pos < text.size()) {
    std::set<std::string> ex{"+", "-", "*", "/", "end of input"};
    if (text[p.pos] == ')') p.fail("unbalanced ')'", ex, p.pos);
    p.fail(std::string("unexpected '") + text[p.pos] + "'", ex, p.pos);
  }
  return e;
}

Poly expr_to_poly(const Expr& e, const ConstField& field, const std::string& var) {
  const Level& K = field.level();
  switch (e->kind) {
    case ExprKind::Num:
      return pconst(K, from_q(K, e->num));
    case ExprKind::Sym:
      return pconst(K, field.symbol(e->name));
    case ExprKind::Var:
      if (e->name != var) throw std::invalid_argument("unexpected variable " + e->name);
      return px(K);
    case ExprKind::Add: {
      Poly r;
      for (auto& a : e->args) r = padd(K, r, expr_to_poly(a, field, var));
      return r;
    }
    case ExprKind::Mul: {
      Poly r{one(K)};
      for (auto& a : e->args) r = pmul(K, r, expr_to_poly(a, field, var));
      return r;
    }
    case ExprKind::Pow: {
      Poly b = expr_to_poly(e->args[0], field, var);
      const Q& r = e->num;
      if (r.get_den() != 1) throw std::invalid_argument("fractional power in a polynomial");
      long k = r.get_num().get_si();
      if (k >= 0) return ppow(K, b, k);
      if (deg(b) != 0) throw std::invalid_argument("negative power of a non-constant in a polynomial");
      return pconst(K, pow(K, b[0], k));
    }
    default:
      throw std::invalid_argument("expression is not a polynomial: " + print(e));
  }
}

ConstVal expr_to_const(const Expr& e, const ConstField& field) {
  Poly p = expr_to_poly(e, field, "\x01");
  if (deg(p) > 0) throw std::invalid_argument("not a constant");
  return p.empty() ? zero(field.level()) : p[0];
}

ConstField parse_constants(const std::string& decl) {
  ConstField F;
  std::vector<std::string> segs;
  std::string cur;
  for (char c : decl) {
    if (c == ';') {
      segs.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  segs.push_back(cur);
  auto is_name_list = [](const std::string& s) {
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ',' || std::isspace(static_cast<unsigned char>(c))))
        return false;
    // a bare number is not a name list
    for (size_t i = 0; i < s.size(); ++i) {
      if (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',') continue;
      if (std::isdigit(static_cast<unsigned char>(s[i])) && (i == 0 || s[i - 1] == ',' || std::isspace(static_cast<unsigned char>(s[i - 1]))))
        return false;
    }
    return true;
  };
  for (size_t si = 0; si < segs.size(); ++si) {
    const std::string& seg = segs[si];
    bool blank = std::all_of(seg.begin(), seg.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) continue;
    if (is_name_list(seg)) {
      std::string name;
      auto flush = [&]() {
        if (!name.empty()) {
          if (F.find(name)) throw std::invalid_argument("duplicate constant " + name);
          F = F.with_transcendental(name);
        }
        name.clear();
      };
      for (char c : seg) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
          flush();
        else
          name += c;
      }
      flush();
      continue;
    }
    // identify the new symbol
    std::set<std::string> fresh;
    for (size_t i = 0; i < seg.size();) {
      if (std::isalpha(static_cast<unsigned char>(seg[i])) || seg[i] == '_') {
        size_t st = i;
        while (i < seg.size() && (std::isalnum(static_cast<unsigned char>(seg[i])) || seg[i] == '_')) ++i;
        std::string id = seg.substr(st, i - st);
        if (!F.find(id) && !kFunctions.count(id)) fresh.insert(id);
      } else {
        ++i;
      }
    }
    if (fresh.size() != 1)
      throw std::invalid_argument("minimal polynomial '" + seg + "' must introduce exactly one new symbol");
    std::string sym = *fresh.begin();
    ParseOptions po;
    po.vars = {sym};
    Expr e = parse(seg, F, po);
    Poly m = expr_to_poly(e, F, sym);
    const Level& K = F.level();
    if (deg(m) < 2) throw std::invalid_argument("minimal polynomial of " + sym + " must have degree at least 2");
    m = pmonic(K, m);
    bool irreducible;
    if (can_factor(K)) {
      irreducible = is_irreducible(K, m);
    } else if (deg(m) == 2) {
      Elem disc = sub(K, mul(K, m[1], m[1]), scale(K, m[0], Q(4)));
      irreducible = !sqrt_in_field(K, disc).has_value();
    } else {
      throw std::invalid_argument("cannot verify irreducibility of " + seg);
    }
    if (!irreducible) throw std::invalid_argument("minimal polynomial '" + seg + "' is reducible");
    F = F.with_algebraic(sym, m);
  }
  return F;
}

InverseDecl parse_inverse_decl(const std::string& decl, const ConstField& field) {
  auto eqp = decl.find('=');
  if (eqp == std::string::npos) throw std::invalid_argument("inverse declaration must look like NAME=EXPR");
  std::string lhs = decl.substr(0, eqp);
  std::string rhs = decl.substr(eqp + 1);
  std::string var = "w";
  auto lp = lhs.find('(');
  if (lp != std::string::npos) {
    auto rp = lhs.find(')', lp);
    var = lhs.substr(lp + 1, rp - lp - 1);
    lhs = lhs.substr(0, lp);
  }
  auto strip = [](std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
  };
  lhs = strip(lhs);
  var = strip(var);
  ParseOptions po;
  po.vars = {var};
  InverseDecl d{lhs, parse(rhs, field, po), var};
  return d;
}

Expr level_elem_to_expr(const Level& L, const Elem& e, const std::function<Expr(const Level&)>& gen_expr) {
  if (L.kind == LevelKind::Base) return e_num(e.q);
  const Level& K = *L.base;
  Expr g = gen_expr(L);
  auto poly_expr = [&](const Poly& p) {
    std::vector<Expr> terms;
    for (size_t i = p.size(); i-- > 0;) {
      if (is_zero(K, p[i])) continue;
      Expr c = level_elem_to_expr(K, p[i], gen_expr);
      terms.push_back(e_mul(c, e_pow(g, Q(static_cast<long>(i)))));
    }
    if (terms.empty()) return e_num(0);
    return e_add(terms);
  };
  Expr n = poly_expr(e.n);
  if (L.kind == LevelKind::Trans && deg(e.d) > 0) return e_div(n, poly_expr(e.d));
  return n;
}

Expr const_to_expr(const ConstField& F, const ConstVal& c) {
  return level_elem_to_expr(F.level(), c, [](const Level& L) { return e_sym(L.name); });
}

// ---------------------------------------------------------------- calculus

Expr differentiate(const Expr& e, const std::string& var) {
  switch (e->kind) {
    case ExprKind::Num:
    case ExprKind::Sym:
      return e_num(0);
    case ExprKind::Var:
      return e_num(e->name == var ? 1 : 0);
    case ExprKind::Add: {
      std::vector<Expr> ts;
      for (auto& a : e->args) ts.push_back(differentiate(a, var));
      return e_add(ts);
    }
    case ExprKind::Mul: {
      std::vector<Expr> ts;
      for (size_t i = 0; i < e->args.size(); ++i) {
        Expr d = differentiate(e->args[i], var);
        if (is_num(d, 0)) continue;
        std::vector<Expr> fs;
        for (size_t j = 0; j < e->args.size(); ++j) fs.push_back(j == i ? d : e->args[j]);
        ts.push_back(e_mul(fs));
      }
      return e_add(ts);
    }
    case ExprKind::Pow: {
      Expr d = differentiate(e->args[0], var);
      if (is_num(d, 0)) return d;
      return e_mul({e_num(e->num), e_pow(e->args[0], e->num - 1), d});
    }
    case ExprKind::Exp: {
      Expr d = differentiate(e->args[0], var);
      if (is_num(d, 0)) return d;
      return e_mul(d, e);
    }
    case ExprKind::Log: {
      Expr d = differentiate(e->args[0], var);
      if (is_num(d, 0)) return d;
      return e_div(d, e->args[0]);
    }
    case ExprKind::Inv:
      throw InverseSymPresent();
  }
  return e_num(0);
}

namespace {

cplx cpow_q(cplx b, const Q& r) {
  if (r.get_den() == 1) {
    long k = r.get_num().get_si();
    cplx res = 1, base = k < 0 ? cplx(1) / b : b;
    for (long i = 0; i < std::labs(k); ++i) res *= base;
    return res;
  }
  if (r == Q(1, 2)) return std::sqrt(b);
  return std::exp(r.get_d() * std::log(b));
}

}  // namespace

cplx eval(const Expr& e, const NumEnv& env) {
  switch (e->kind) {
    case ExprKind::Num:
      return e->num.get_d();
    case ExprKind::Sym:
    case ExprKind::Var: {
      auto it = env.values.find(e->name);
      if (it == env.values.end()) throw std::invalid_argument("no numeric value for " + e->name);
      return it->second;
    }
    case ExprKind::Add: {
      cplx s = 0;
      for (auto& a : e->args) s += eval(a, env);
      return s;
    }
    case ExprKind::Mul: {
      cplx s = 1;
      for (auto& a : e->args) s *= eval(a, env);
      return s;
    }
    case ExprKind::Pow:
      return cpow_q(eval(e->args[0], env), e->num);
    case ExprKind::Exp:
      return std::exp(eval(e->args[0], env));
    case ExprKind::Log:
      return std::log(eval(e->args[0], env));
    case ExprKind::Inv:
      if (!env.inverse) throw std::invalid_argument("no numeric inverse for " + e->name);
      return env.inverse(e->name, eval(e->args[0], env));
  }
  return 0;
}

std::pair<cplx, cplx> eval_dual(const Expr& e, const NumEnv& env, const std::string& var) {
  using D = std::pair<cplx, cplx>;
  switch (e->kind) {
    case ExprKind::Num:
      return {e->num.get_d(), 0};
    case ExprKind::Sym:
      return {eval(e, env), 0};
    case ExprKind::Var:
      return {eval(e, env), e->name == var ? 1.0 : 0.0};
    case ExprKind::Add: {
      D s{0, 0};
      for (auto& a : e->args) {
        D t = eval_dual(a, env, var);
        s.first += t.first;
        s.second += t.second;
      }
      return s;
    }
    case ExprKind::Mul: {
      D s{1, 0};
      for (auto& a : e->args) {
        D t = eval_dual(a, env, var);
        s = {s.first * t.first, s.first * t.second + s.second * t.first};
      }
      return s;
    }
    case ExprKind::Pow: {
      D b = eval_dual(e->args[0], env, var);
      cplx v = cpow_q(b.first, e->num);
      cplx d = e->num.get_d() * cpow_q(b.first, e->num - 1) * b.second;
      return {v, d};
    }
    case ExprKind::Exp: {
      D a = eval_dual(e->args[0], env, var);
      cplx v = std::exp(a.first);
      return {v, v * a.second};
    }
    case ExprKind::Log: {
      D a = eval_dual(e->args[0], env, var);
      return {std::log(a.first), a.second / a.first};
    }
    case ExprKind::Inv: {
      D a = eval_dual(e->args[0], env, var);
      if (!env.inverse) throw std::invalid_argument("no numeric inverse for " + e->name);
      cplx w = env.inverse(e->name, a.first);
      NumEnv inner = env;
      inner.values[e->def_var] = w;
      cplx fp = eval_dual(e->def, inner, e->def_var).second;
      return {w, a.second / fp};
    }
  }
  return {0, 0};
}

}  // namespace finterm
