// Random presentations over C(z) for the predimension properties.
#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace finterm::testing {

inline // random presentation over C(z) with n generators
std::string random_presentation(std::mt19937& rng, int n) {
  std::ostringstream out;
  out << "base z\n";
  std::vector<std::string> names;
  const char* factors[] = {"z", "(z+1)", "(z-1)", "(z^2+1)"};
  for (int i = 0; i < n; ++i) {
    std::string name = "g" + std::to_string(i);
    int kind = rng() % 5;
    out << "gen " << name;
    if (kind <= 1) {
      out << " = exp(";
      int c = static_cast<int>(rng() % 3) + 1;
      out << c << "*z";
      for (auto& m : names)
        if (rng() % 3 == 0) out << " + " << static_cast<int>(rng() % 5) - 2 << "*" << m;
      out << ")";
    } else if (kind <= 3) {
      out << " = log(";
      out << factors[rng() % 4];
      if (rng() % 2) out << "^" << static_cast<int>(rng() % 3) + 1;
      for (auto& m : names)
        if (rng() % 4 == 0) out << "*" << m << "^" << static_cast<int>(rng() % 2) + 1;
      out << ")";
    } else {
      out << " free";
    }
    out << "\n";
    names.push_back(name);
  }
  return out.str();
}

}  // namespace finterm::testing
