#pragma once

#include <random>

#include "finterm/expr.hpp"

namespace finterm::testing {

struct ExprGen {
  std::mt19937_64 rng;
  std::vector<std::string> syms;
  bool allow_log = true;

  explicit ExprGen(uint64_t seed, std::vector<std::string> s = {}) : rng(seed), syms(std::move(s)) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Expr leaf() {
    int k = pick(0, syms.empty() ? 2 : 3);
    if (k <= 1) return e_var("z");
    if (k == 2) return e_num(Q(pick(-4, 5), pick(1, 3)));
    return e_sym(syms[pick(0, static_cast<int>(syms.size()) - 1)]);
  }

  Expr gen(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(0, allow_log ? 6 : 5)) {
      case 0:
        return leaf();
      case 1:
      case 2:
        return e_add(gen(depth - 1), gen(depth - 1));
      case 3:
        return e_mul(gen(depth - 1), gen(depth - 1));
      case 4: {
        static const Q exps[] = {Q(2), Q(3), Q(-1), Q(1, 2), Q(-1, 2), Q(3, 2), Q(-2)};
        Expr b = e_add(gen(depth - 1), e_num(pick(1, 3)));
        if (is_num(b, 0)) b = e_num(2);
        return e_pow(b, exps[pick(0, 6)]);
      }
      case 5:
        return e_exp(e_mul(e_num(Q(pick(-2, 2), pick(1, 3))), gen(depth - 1)));
      default:
        return e_log(e_add(gen(depth - 1), e_num(pick(2, 4))));
    }
  }
};

}  // namespace finterm::testing
