#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finterm/blurred.hpp"
#include "finterm/expalg.hpp"
#include "finterm/special.hpp"

namespace finterm::cli {

using nlohmann::json;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool have = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else if (c == '\'') {
      size_t e = line.find('\'', i + 1);
      if (e == std::string::npos) throw std::invalid_argument("unterminated single quote");
      cur += line.substr(i + 1, e - i - 1);
      have = true;
      i = e;
    } else if (c == '"') {
      have = true;
      for (++i;; ++i) {
        if (i >= line.size()) throw std::invalid_argument("unterminated double quote");
        if (line[i] == '"') break;
        if (line[i] == '\\' && i + 1 < line.size()) ++i;
        cur += line[i];
      }
    } else {
      cur += c;
      have = true;
    }
  }
  if (have) out.push_back(cur);
  return out;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (auto& a : args) {
    if (!out.empty()) out += ' ';
    bool plain = !a.empty() && a.find_first_of(" \t\"'\\") == std::string::npos;
    if (plain) {
      out += a;
      continue;
    }
    out += '"';
    for (char c : a) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  return out;
}

namespace {

struct Query {
  std::string constants;
  std::vector<std::string> inverses;
  int max_gens = 16;
  bool json_out = false;
  std::string batch;

  std::string expr, var;
  std::string F, G, name = "W";
  std::string V, h0, omega;
  std::string radicand, coef = "1";
  std::string p, q;
  std::string file;
  std::vector<std::string> target;
};

// input text that failed to parse, with the error position inside it
struct BadInput : std::runtime_error {
  std::string text;
  size_t position;
  BadInput(const std::string& label, std::string t, size_t pos, const std::string& msg)
      : std::runtime_error(label + ": " + msg), text(std::move(t)), position(pos) {}
};

struct UnsupportedQuery : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Expr parse_input(const std::string& label, const std::string& text, const ConstField& F, ParseOptions po) {
  try {
    return parse(text, F, po);
  } catch (const ParseError& e) {
    throw BadInput(label, text, e.diag.position, e.diag.message);
  }
}

ConstField parse_field(const std::string& text) {
  try {
    return parse_constants(text);
  } catch (const ParseError& e) {
    throw BadInput("--constants", text, e.diag.position, e.diag.message);
  }
}

ConstVal parse_const(const std::string& label, const std::string& text, const ConstField& F) {
  ParseOptions po;
  po.vars.clear();
  return expr_to_const(parse_input(label, text, F, po), F);
}

Q parse_rational(const std::string& label, const std::string& text) {
  try {
    Q r(text);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw BadInput(label, text, 0, "expected a rational number");
  }
}

json new_constants(const ConstField& in, const ConstField& out, const std::vector<FreshConstant>& fresh) {
  json arr = json::array();
  for (auto& f : fresh) arr.push_back({{"name", f.name}, {"definition", print(f.def)}});
  for (auto& L : out.chain()) {
    if (L->kind == LevelKind::Base || in.find(L->name)) continue;
    bool listed = false;
    for (auto& f : fresh) listed = listed || f.name == L->name;
    if (listed) continue;
    if (L->kind == LevelKind::Alg) {
      ConstField below;
      below.top = L->base;
      arr.push_back({{"name", L->name}, {"definition", "root of " + print(poly_to_expr(below, L->minpoly, L->name))}});
    }
    else
      arr.push_back({{"name", L->name}, {"definition", "transcendental"}});
  }
  return arr;
}

void fill(Outcome& o, const char* decision, const Expr& witness, const std::vector<std::string>& path, json constants,
          const std::string& detail) {
  o.record["decision"] = decision;
  o.record["witness"] = witness ? json(print(witness)) : json(nullptr);
  o.record["path"] = path;
  o.record["new_constants"] = std::move(constants);
  if (!detail.empty()) o.record["detail"] = detail;
}

void special_outcome(Outcome& o, const SpecialResult& r, const ConstField& in) {
  switch (r.kind) {
    case SpecialResult::Elementary:
      fill(o, "elementary", r.antiderivative, r.path, new_constants(in, r.field, r.fresh), r.detail);
      o.text = "elementary: " + print(r.antiderivative);
      break;
    case SpecialResult::NotElementary:
      fill(o, "not-elementary", nullptr, r.path, json::array(), r.detail);
      o.text = "not elementary";
      break;
    default:
      fill(o, "unsupported", nullptr, r.path, json::array(), r.detail);
      o.text = "unsupported: " + r.detail;
      o.exit_code = UnsupportedExit;
  }
}

void expalg_outcome(Outcome& o, const ExpAlgDecision& d, const ConstField& in) {
  std::vector<std::string> path = d.path;
  path.insert(path.begin(), via_name(d.via));
  switch (d.kind) {
    case ExpAlgDecision::ExpAlgebraic:
      fill(o, "exp-algebraic", d.witness, path, new_constants(in, d.field, d.fresh), d.reason);
      o.text = "exp-algebraic: " + print(d.witness);
      break;
    case ExpAlgDecision::NotExpAlgebraic:
      fill(o, "not-exp-algebraic", nullptr, path, json::array(), d.reason);
      o.text = "not exp-algebraic";
      break;
    default:
      fill(o, "unsupported", nullptr, path, json::array(), d.reason);
      o.text = "unsupported: " + d.reason;
      o.exit_code = UnsupportedExit;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<int> resolve_target(const BlurredPresentation& P, const std::vector<std::string>& names) {
  if (names.empty()) {
    if (P.target.empty()) throw std::invalid_argument("no target given (use a 'target' line or --target)");
    return P.target;
  }
  std::vector<int> out;
  for (auto& n : names) {
    int i = P.index(n);
    if (i < 0) throw std::invalid_argument("unknown generator '" + n + "'");
    out.push_back(i);
  }
  return out;
}

void computed(Outcome& o, json value, std::string text) {
  o.record["decision"] = "computed";
  o.record["value"] = std::move(value);
  o.text = std::move(text);
}

void setup(CLI::App& app, Query& q) {
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.add_option("--constants", q.constants, "constant field, e.g. \"t; a^2-2\"");
  app.add_option("--declare-inverse", q.inverses, "inverse symbol NAME=EXPR in w, e.g. W=w*exp(w)")
      ->allow_extra_args(false);
  app.add_option("--max-gens", q.max_gens, "generator bound for hull searches")->check(CLI::PositiveNumber);
  app.add_flag("--json", q.json_out, "machine-readable output");
  app.add_option("--batch", q.batch, "file with one query per line");

  auto* s = app.add_subcommand("integrate", "elementary antiderivative");
  s->add_option("expr", q.expr)->required();
  s->add_option("--var", q.var);
  s = app.add_subcommand("expalg", "is the antiderivative exponentially algebraic");
  s->add_option("expr", q.expr)->required();
  s->add_option("--var", q.var);
  s = app.add_subcommand("inverse", "integrand G(z, W(z)) with W a local inverse of F(w)");
  s->add_option("--F", q.F)->required();
  s->add_option("--G", q.G)->required();
  s->add_option("--name", q.name);
  s = app.add_subcommand("hamiltonian", "(dy/dx)^2 = h0 - V(x)");
  s->add_option("--V", q.V)->required();
  s->add_option("--h0", q.h0)->required();
  s->add_option("--var", q.var);
  s = app.add_subcommand("pendulum", "theta'' = -omega^2 sin(theta) at energy h0");
  s->add_option("--omega", q.omega)->required();
  s->add_option("--h0", q.h0)->required();
  s = app.add_subcommand("elliptic", "c / sqrt(P) with deg P in {3, 4}");
  s->add_option("--radicand", q.radicand)->required();
  s->add_option("--coef", q.coef);
  s = app.add_subcommand("chebyshev", "z^p (1-z)^q");
  s->add_option("-p,--p", q.p)->required();
  s->add_option("-q,--q", q.q)->required();
  for (const char* name : {"predim", "hull", "etd", "selfsuff"}) {
    s = app.add_subcommand(name, std::string("blurred presentation: ") + name);
    s->add_option("file", q.file)->required();
    if (std::string(name) == "hull" || std::string(name) == "etd") s->add_option("--target", q.target);
  }
}

void dispatch(const std::string& cmd, const Query& q, Outcome& o) {
  ConstField F = parse_field(q.constants);
  ParseOptions po;
  for (auto& d : q.inverses) {
    try {
      po.inverses.push_back(parse_inverse_decl(d, F));
    } catch (const ParseError& e) {
      throw BadInput("--declare-inverse", d, e.diag.position, e.diag.message);
    }
  }
  std::string var = q.var.empty() ? (cmd == "hamiltonian" ? "x" : "z") : q.var;
  po.vars = {var};

  if (cmd == "integrate") {
    Expr f = parse_input("integrand", q.expr, F, po);
    if (contains_inverse(f)) throw UnsupportedQuery("inverse symbols are handled by 'expalg' and 'inverse'");
    special_outcome(o, integrate_elementary(f, F, var), F);
  } else if (cmd == "expalg") {
    Expr f = parse_input("integrand", q.expr, F, po);
    if (!contains_inverse(f)) {
      expalg_outcome(o, decide_expalg_integral(f, F, var), F);
      return;
    }
    // G(z, W(z)) with a single declared inverse applied to the variable
    const InverseDecl* used = nullptr;
    for (auto& d : po.inverses) {
      bool hit = false;
      substitute_inverse(f, d.name, [&](const Expr& a) {
        if (a->kind != ExprKind::Var || a->name != var) throw UnsupportedQuery(d.name + " must be applied to " + var);
        hit = true;
        return a;
      });
      if (!hit) continue;
      if (used) throw UnsupportedQuery("at most one inverse symbol per integrand");
      used = &d;
    }
    if (!used || used->var == var) throw UnsupportedQuery("inverse variable must differ from " + var);
    Expr G = substitute_inverse(f, used->name, [&](const Expr&) { return e_var(used->var); });
    expalg_outcome(o, decide_inverse_integral(used->def, G, F, used->name, var, used->var), F);
  } else if (cmd == "inverse") {
    ParseOptions pw;
    pw.vars = {"w"};
    ParseOptions pg;
    pg.vars = {"z", "w"};
    Expr Fw = parse_input("--F", q.F, F, pw);
    Expr G = parse_input("--G", q.G, F, pg);
    expalg_outcome(o, decide_inverse_integral(Fw, G, F, q.name), F);
  } else if (cmd == "hamiltonian") {
    Expr V = parse_input("--V", q.V, F, po);
    expalg_outcome(o, decide_hamiltonian(V, parse_const("--h0", q.h0, F), F, var), F);
  } else if (cmd == "pendulum") {
    expalg_outcome(o, decide_pendulum(parse_const("--omega", q.omega, F), parse_const("--h0", q.h0, F), F), F);
  } else if (cmd == "elliptic") {
    Expr P = parse_input("--radicand", q.radicand, F, po);
    special_outcome(o, elliptic_first_kind(expr_to_poly(P, F, var), parse_const("--coef", q.coef, F), F, var), F);
  } else if (cmd == "chebyshev") {
    special_outcome(o, chebyshev(parse_rational("-p", q.p), parse_rational("-q", q.q), var), F);
  } else {
    BlurredPresentation P = parse_presentation(read_file(q.file));
    if (cmd == "predim") {
      int d = predim(P);
      computed(o, d, "predim: " + std::to_string(d));
    } else if (cmd == "etd") {
      int e = etd(P, resolve_target(P, q.target), q.max_gens);
      computed(o, e, "etd: " + std::to_string(e));
    } else if (cmd == "selfsuff") {
      bool s = self_sufficient(P, q.max_gens);
      o.record["decision"] = s ? "self-sufficient" : "not-self-sufficient";
      o.record["value"] = s;
      o.text = s ? "self-sufficient" : "not self-sufficient";
    } else {
      HullResult H = hull(P, resolve_target(P, q.target), q.max_gens);
      std::vector<std::string> names, lines;
      for (int g : H.gens) names.push_back(P.gens[g].name);
      lines = H.lines;
      auto syms = P.field.symbols();
      if (!syms.empty()) {
        std::string c = "const";
        for (auto& s : syms) c += " " + s;
        lines.insert(lines.begin() + 1, c);
      }
      json basis = json::array();
      for (auto& r : H.pair_basis) {
        json row = json::array();
        for (auto& x : r) row.push_back(x.get_str());
        basis.push_back(row);
      }
      std::string text;
      for (auto& l : lines) text += l + "\n";
      text += "# generators:";
      for (auto& n : names) text += " " + n;
      text += "\n# td " + std::to_string(H.td) + ", delta " + std::to_string(H.delta);
      computed(o,
               {{"generators", names}, {"td", H.td}, {"delta", H.delta}, {"pair_basis", basis}, {"presentation", lines}},
               text);
    }
  }
}

void error_outcome(Outcome& o, int code, const std::string& kind, const std::string& msg, const std::string& diag = "") {
  o.exit_code = code;
  o.record["decision"] = nullptr;
  o.record["error"] = {{"kind", kind}, {"message", msg}};
  o.error = "error: " + msg + (diag.empty() ? "" : "\n" + diag);
}

}  // namespace

Outcome run_query(const std::vector<std::string>& args, const Defaults& d) {
  Outcome o;
  std::vector<std::string> shown;
  for (auto& a : args)
    if (a != "--json") shown.push_back(a);
  o.record["input"] = join_args(shown);
  Query q;
  q.constants = d.constants;
  q.inverses = d.inverses;
  q.max_gens = d.max_gens;
  CLI::App app{"finterm"};
  setup(app, q);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (app.get_subcommands().empty()) throw CLI::RequiredError("a subcommand");
  } catch (const CLI::CallForHelp&) {
    o.text = app.help();
    return o;
  } catch (const CLI::ParseError& e) {
    error_outcome(o, InputError, "usage", e.what());
    return o;
  }
  std::string cmd = app.get_subcommands()[0]->get_name();
  try {
    dispatch(cmd, q, o);
  } catch (const BadInput& e) {
    o.record["error"] = nullptr;
    error_outcome(o, InputError, "parse", e.what(), e.text + "\n" + std::string(e.position, ' ') + "^");
    o.record["error"]["position"] = e.position;
  } catch (const PresentationError& e) {
    error_outcome(o, InputError, "parse", e.what(), e.caret());
    o.record["error"]["line"] = e.line;
    o.record["error"]["position"] = e.column;
  } catch (const CannotCertifyMonomial& e) {
    error_outcome(o, CannotCertify, "cannot-certify-monomial", e.what());
  } catch (const UnsupportedQuery& e) {
    fill(o, "unsupported", nullptr, {}, json::array(), e.what());
    o.text = std::string("unsupported: ") + e.what();
    o.exit_code = UnsupportedExit;
  } catch (const AlgebraicMonomialUnsupported& e) {
    fill(o, "unsupported", nullptr, {}, json::array(), e.what());
    o.text = std::string("unsupported: ") + e.what();
    o.exit_code = UnsupportedExit;
  } catch (const Unsupported& e) {
    fill(o, "unsupported", nullptr, {}, json::array(), e.what());
    o.text = std::string("unsupported: ") + e.what();
    o.exit_code = UnsupportedExit;
  } catch (const UnfactorableArgument& e) {
    error_outcome(o, InputError, "unfactorable-argument", e.what());
  } catch (const TooManyGenerators& e) {
    error_outcome(o, InputError, "too-many-generators", std::string(e.what()) + " (raise --max-gens)");
  } catch (const std::invalid_argument& e) {
    error_outcome(o, InputError, "invalid-input", e.what());
  } catch (const std::domain_error& e) {
    error_outcome(o, InputError, "invalid-input", e.what());
  } catch (const std::exception& e) {
    error_outcome(o, Internal, "internal", e.what());
  }
  return o;
}

json run_batch(std::istream& in, const Defaults& d, std::ostream& out) {
  json counts = json::object();
  int total = 0, errors = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.back() == '\r') line.pop_back();
    Outcome o;
    try {
      o = run_query(split_line(line), d);
    } catch (const std::invalid_argument& e) {
      o.record["input"] = line.substr(first);
      error_outcome(o, InputError, "usage", e.what());
    }
    ++total;
    if (o.record.contains("error") && !o.record["error"].is_null()) {
      ++errors;
    } else {
      std::string k = o.record["decision"].get<std::string>();
      counts[k] = counts.value(k, 0) + 1;
    }
    out << o.record.dump() << "\n";
  }
  json summary = {{"summary", {{"total", total}, {"decisions", counts}, {"errors", errors}}}};
  out << summary.dump() << "\n";
  return summary;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  // global options only: batch mode or a single query
  Query q;
  CLI::App app{"finterm"};
  setup(app, q);
  try {
    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Decided;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return InputError;
  }
  Defaults d{q.constants, q.inverses, q.max_gens};
  if (!q.batch.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "error: --batch does not take a subcommand\n";
      return InputError;
    }
    std::ifstream f(q.batch);
    if (!f) {
      err << "error: cannot read " << q.batch << "\n";
      return InputError;
    }
    run_batch(f, d, out);
    return Decided;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return InputError;
  }
  Outcome o = run_query(argv, {});
  if (q.json_out)
    out << o.record.dump() << "\n";
  else if (!o.text.empty())
    out << o.text << "\n";
  if (!o.error.empty()) err << o.error << "\n";
  return o.exit_code;
}

}  // namespace finterm::cli
