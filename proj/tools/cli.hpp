// Command-line front end: single queries, batch files, text and JSON output.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace finterm::cli {

enum Exit { Decided = 0, Internal = 1, InputError = 2, UnsupportedExit = 3, CannotCertify = 4 };

struct Defaults {
  std::string constants;
  std::vector<std::string> inverses;  // NAME=EXPR
  int max_gens = 16;
};

struct Outcome {
  int exit_code = Decided;
  nlohmann::json record;  // one JSON record
  std::string text;       // human-readable result
  std::string error;      // diagnostic for stderr
};

// shell-like splitting: whitespace, '...' literal, "..." with backslash escapes
std::vector<std::string> split_line(const std::string& line);
std::string join_args(const std::vector<std::string>& args);

Outcome run_query(const std::vector<std::string>& args, const Defaults& d = {});
// one record per nonblank, non-comment line, then a summary record
nlohmann::json run_batch(std::istream& in, const Defaults& d, std::ostream& out);
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace finterm::cli
