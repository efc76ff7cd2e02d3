#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "etasol/error.hpp"

namespace etasol {

/// Dense tensor components at a point. Contravariant slots come first in the
/// index order, so R^l_{ijk} is stored as (l, i, j, k) and Gamma^k_{ij} as (k, i, j).
struct TensorValue {
  int contravariant = 0;
  int covariant = 0;
  int dim = 0;
  std::vector<double> data;
  std::vector<double> point;

  static TensorValue zeros(int up, int down, int n, std::span<const double> at = {}) {
    TensorValue t;
    t.contravariant = up;
    t.covariant = down;
    t.dim = n;
    std::size_t size = 1;
    for (int r = 0; r < up + down; ++r) size *= static_cast<std::size_t>(n);
    t.data.assign(size, 0.0);
    t.point.assign(at.begin(), at.end());
    return t;
  }

  int rank() const noexcept { return contravariant + covariant; }

  template <typename... I>
  double& operator()(I... idx) {
    return data[flat(idx...)];
  }
  template <typename... I>
  double operator()(I... idx) const {
    return data[flat(idx...)];
  }

  template <typename... I>
  std::size_t flat(I... idx) const {
    std::size_t f = 0;
    ((f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx)), ...);
    return f;
  }

  void check_shape(const TensorValue& o) const {
    if (contravariant != o.contravariant || covariant != o.covariant || dim != o.dim) {
      throw DimensionError("tensor shape mismatch");
    }
  }

  TensorValue& operator+=(const TensorValue& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }
  TensorValue& operator-=(const TensorValue& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
    return *this;
  }
  TensorValue& operator*=(double c) {
    for (double& x : data) x *= c;
    return *this;
  }
};

inline TensorValue operator+(TensorValue a, const TensorValue& b) { return a += b; }
inline TensorValue operator-(TensorValue a, const TensorValue& b) { return a -= b; }
inline TensorValue operator*(double c, TensorValue a) { return a *= c; }

/// Largest absolute component (NaN propagates).
inline double max_abs(const TensorValue& t) {
  double m = 0.0;
  for (double x : t.data) {
    if (std::isnan(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace etasol
