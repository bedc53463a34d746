#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace finterm::cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run call(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = run(args, o, e);
  return {c, o.str(), e.str()};
}

std::vector<json> lines_of(const std::string& s) {
  std::vector<json> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(json::parse(l));
  return out;
}

std::string temp_file(const std::string& name, const std::string& body) {
  std::string path = "/tmp/finterm_cli_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("split and join") {
  CHECK(split_line("integrate \"log(z) + 1\" --json") == std::vector<std::string>{"integrate", "log(z) + 1", "--json"});
  CHECK(split_line("a 'b c' \"d\\\"e\"") == std::vector<std::string>{"a", "b c", "d\"e"});
  CHECK(split_line("  ").empty());
  CHECK_THROWS_AS(split_line("integrate \"1/z"), std::invalid_argument);
  std::vector<std::string> args{"inverse", "--F", "w*exp(w)", "--G", "w / z", "say \"hi\""};
  CHECK(split_line(join_args(args)) == args);
}

TEST_CASE("single queries") {
  auto r = call({"inverse", "--F", "w*exp(w)", "--G", "w/z"});
  CHECK(r.code == 0);
  CHECK(r.out == "exp-algebraic: W(z)^2/2 + W(z)\n");

  r = call({"pendulum", "--omega", "1", "--h0", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "not exp-algebraic\n");

  r = call({"integrate", "log(z"});
  CHECK(r.code == 2);
  CHECK(r.err.find("^") != std::string::npos);
  CHECK(r.err.find("log(z\n     ^") != std::string::npos);

  r = call({"integrate", "2*z*exp(z^2)"});
  CHECK(r.code == 0);
  CHECK(r.out == "elementary: exp(z^2)\n");

  CHECK(call({"integrate", "exp(-z^2)"}).out == "not elementary\n");
  CHECK(call({"integrate", "z/sqrt(z^4+1)"}).code == 3);
  CHECK(call({"elliptic", "--radicand", "z^3 - z"}).out == "not elementary\n");
  CHECK(call({"elliptic", "--radicand", "z^3"}).out == "elementary: -2/sqrt(z)\n");
  CHECK(call({"chebyshev", "-p", "1/3", "-q", "1/5"}).out == "not elementary\n");
  CHECK(call({"chebyshev", "-p", "x", "-q", "1"}).code == 2);
  CHECK(call({"hamiltonian", "--V", "x^3", "--h0", "1"}).out == "not exp-algebraic\n");
  CHECK(call({"pendulum", "--omega", "0", "--h0", "1"}).code == 2);
  CHECK(call({"expalg", "--declare-inverse", "W=w*exp(w)", "W(z)/z"}).out == "exp-algebraic: W(z)^2/2 + W(z)\n");
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("json records") {
  auto r = call({"integrate", "1/(z^2-2)", "--json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["decision"] == "elementary");
  CHECK(j["input"] == "integrate 1/(z^2-2)");
  CHECK(j["new_constants"].size() == 1);
  CHECK(j["path"].is_array());
  CHECK(j["witness"].is_string());

  j = json::parse(call({"--json", "expalg", "exp(-z^2)"}).out);
  CHECK(j["decision"] == "not-exp-algebraic");
  CHECK(j["witness"].is_null());
}

TEST_CASE("blurred subcommands") {
  std::string e = temp_file("e210", "base z\ngen b1 = exp(z)\ngen b2 = exp(b1)\ncut b2\n");
  CHECK(call({"predim", e}).out == "predim: -1\n");
  CHECK(call({"selfsuff", e}).out == "not self-sufficient\n");
  std::string rat = temp_file("rat", "base z\ngen x1 = log(z)\ngen x2 = log(z+1)\ngen f = x1 + 2/3*x2\ntarget f\n");
  auto h = call({"hull", rat});
  CHECK(h.code == 0);
  CHECK(h.out.find("gen h1 = log(z^3*(z + 1)^2)") != std::string::npos);
  CHECK(call({"etd", rat}).out == "etd: 0\n");
  CHECK(call({"etd", rat, "--target", "x1", "x2"}).out == "etd: 0\n");
  std::string bad = temp_file("bad", "base z\ngen b = exp(z +)\n");
  auto b = call({"predim", bad});
  CHECK(b.code == 2);
  CHECK(b.err.find("line 2") != std::string::npos);
  std::string big;
  for (int i = 0; i < 5; ++i) big += "gen f" + std::to_string(i) + " free\n";
  std::string bf = temp_file("big", "base z\n" + big + "target f0\n");
  CHECK(call({"hull", bf, "--max-gens", "4"}).code == 2);
  CHECK(call({"hull", bf, "--max-gens", "5"}).code == 0);
}

TEST_CASE("batch mode") {
  std::string f = temp_file("batch", "integrate \"1/z\"\nexpalg \"exp(-z^2)\"\n# comment\n\npendulum --omega 1 --h0 1\n");
  auto r = call({"--batch", f});
  CHECK(r.code == 0);
  auto recs = lines_of(r.out);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0]["decision"] == "elementary");
  CHECK(recs[1]["decision"] == "not-exp-algebraic");
  CHECK(recs[2]["decision"] == "exp-algebraic");
  CHECK(recs[3]["summary"]["total"] == 3);
  CHECK(recs[3]["summary"]["errors"] == 0);

  auto empty = call({"--batch", temp_file("empty", "")});
  CHECK(empty.code == 0);
  recs = lines_of(empty.out);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0]["summary"]["total"] == 0);

  auto mixed = call({"--batch", temp_file("mixed", "integrate \"1/z\"\nintegrate \"log(z\"\nintegrate z\n")});
  CHECK(mixed.code == 0);
  recs = lines_of(mixed.out);
  REQUIRE(recs.size() == 4);
  CHECK(recs[1]["error"]["kind"] == "parse");
  CHECK(recs[3]["summary"]["errors"] == 1);
  CHECK(recs[3]["summary"]["decisions"]["elementary"] == 2);

  CHECK(call({"--batch", "/nonexistent/file"}).code == 2);
}

TEST_CASE("records round-trip through their input") {
  std::string body =
      "integrate \"z*exp(z)\"\nexpalg \"1/sqrt(z^3 - z)\"\ninverse --F \"w*exp(w)\" --G \"w/z\"\n"
      "hamiltonian --V \"x^2\" --h0 1\nchebyshev -p 1/2 -q 3/2\nelliptic --radicand \"z^4 + z\"\n"
      "--constants \"; i^2+1\" integrate \"cos(z)\"\n";
  std::istringstream in(body);
  std::ostringstream out;
  run_batch(in, {}, out);
  auto recs = lines_of(out.str());
  REQUIRE(recs.size() == 8);
  for (size_t k = 0; k + 1 < recs.size(); ++k) {
    CAPTURE(recs[k].dump());
    Outcome again = run_query(split_line(recs[k]["input"].get<std::string>()));
    CHECK(again.record == recs[k]);
    CHECK(json::parse(recs[k].dump()) == recs[k]);
  }
}

TEST_CASE("batch results do not depend on line order") {
  std::vector<std::string> lines{"integrate \"1/z\"", "expalg \"exp(z)/z\"", "pendulum --omega 2 --h0 4",
                                 "integrate \"log(z)^2\"", "chebyshev -p 1/2 -q 1/3"};
  auto batch = [&](const std::vector<std::string>& ls) {
    std::string body;
    for (auto& l : ls) body += l + "\n";
    std::istringstream in(body);
    std::ostringstream out;
    run_batch(in, {}, out);
    std::map<std::string, json> by_input;
    for (auto& r : lines_of(out.str()))
      if (r.contains("input")) by_input[r["input"]] = r;
    return by_input;
  };
  auto a = batch(lines);
  std::reverse(lines.begin(), lines.end());
  CHECK(batch(lines) == a);
}
