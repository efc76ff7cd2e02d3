#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "etasol/catalog.hpp"
#include "etasol/geometry.hpp"

namespace etasol::testing {

inline ExprMatrix matrix(const std::vector<std::vector<std::string>>& rows) {
  ExprMatrix m;
  for (const auto& r : rows) {
    std::vector<Expr> row;
    for (const auto& s : r) row.push_back(parse(s));
    m.push_back(std::move(row));
  }
  return m;
}

inline ExprMatrix identity_matrix(int n) {
  ExprMatrix m(std::size_t(n), std::vector<Expr>(std::size_t(n), Expr::number(0.0)));
  for (int i = 0; i < n; ++i) m[std::size_t(i)][std::size_t(i)] = Expr::number(1.0);
  return m;
}

inline Box cube(int n, double lo, double hi) {
  return Box{std::vector<double>(std::size_t(n), lo), std::vector<double>(std::size_t(n), hi)};
}

inline ManifoldSpec euclidean(std::vector<std::string> coords, double lo = -2.0, double hi = 2.0) {
  const int n = static_cast<int>(coords.size());
  return ManifoldSpec("flat", std::move(coords), cube(n, lo, hi), identity_matrix(n), identity_matrix(n));
}

inline const ManifoldSpec& hyperbolic() { return catalog_get("hyperbolic-uhs-3").chart(); }

/// A non-diagonal metric with no symmetry, SPD on [-1, 1]^3.
inline ManifoldSpec lumpy() {
  return ManifoldSpec("lumpy", {"x", "y", "z"}, cube(3, -1.0, 1.0),
                      matrix({{"2 + sin(x*y)", "0.3*cos(z)", "0.1*x*y"},
                              {"0.3*cos(z)", "1.5 + x^2/4", "0.2*sin(x+z)"},
                              {"0.1*x*y", "0.2*sin(x+z)", "exp(z/3) + y^2/5"}}));
}

/// Uniform doubles in [lo, hi) from a fixed-seed engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Smooth test potentials over (x, y, z), indexed by k.
inline Expr smooth_potential(int k) {
  static const char* kForms[] = {
      "sin(x) + cos(y)*z/3",
      "x*y + z^2/2 - exp(x/4)",
      "ln(2 + x^2) * cos(z/2) + y",
      "sqrt(3 + y^2) - x*z^3/10",
      "exp(-(x^2 + y^2)/4) + sin(x*z/2)",
  };
  return parse(kForms[k % 5]);
}

/// Same, in two variables (u, v).
inline Expr smooth_potential_2d(int k) {
  static const char* kForms[] = {
      "sin(u) + cos(v)/3", "u*v + v^2/2 - exp(u/4)", "ln(2 + u^2) * cos(v/2)", "sqrt(3 + v^2) - u^3/10",
      "exp(-(u^2 + v^2)/4) + sin(u*v/2)",
  };
  return parse(kForms[k % 5]);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace etasol::testing
