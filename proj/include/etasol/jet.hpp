#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet<K> carries the value of a scalar function together with all of its
// raw (non-factorial-scaled) partial derivatives up to order K, in up to
// kMaxVars variables. Higher derivative stacks are stored packed: only the
// entries with sorted indices i <= j (<= k) exist, so permutation symmetry is
// structural. The packing is prefix-stable in the number of variables: the
// entries for n variables are the first n(n+1)/2 (resp. n(n+1)(n+2)/6) slots.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include "etasol/error.hpp"

namespace etasol {

inline constexpr int kMaxVars = 8;

namespace detail {

constexpr int packed_index(int i, int j) noexcept { return j * (j + 1) / 2 + i; }
constexpr int packed_index(int i, int j, int k) noexcept {
  return k * (k + 1) * (k + 2) / 6 + j * (j + 1) / 2 + i;
}
constexpr int packed_count2(int n) noexcept { return n * (n + 1) / 2; }
constexpr int packed_count3(int n) noexcept { return n * (n + 1) * (n + 2) / 6; }

inline int sorted_index(int i, int j) noexcept {
  if (i > j) std::swap(i, j);
  return packed_index(i, j);
}

inline int sorted_index(int i, int j, int k) noexcept {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
  return packed_index(i, j, k);
}

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

template <int Order>
class Jet {
  static_assert(Order >= 0 && Order <= 3, "jet order must be in [0, 3]");

  static constexpr int kSize1 = Order >= 1 ? kMaxVars : 0;
  static constexpr int kSize2 = Order >= 2 ? detail::packed_count2(kMaxVars) : 0;
  static constexpr int kSize3 = Order >= 3 ? detail::packed_count3(kMaxVars) : 0;

 public:
  static constexpr int order = Order;

  Jet() = default;

  /// Constant function with the given value.
  Jet(int nvars, double value) : n_(nvars), v_(value) {
    if (nvars < 0 || nvars > kMaxVars) {
      throw DimensionError("jet variable count " + std::to_string(nvars) + " outside [0, " +
                           std::to_string(kMaxVars) + "]");
    }
  }

  /// Coordinate function `index` evaluated at `point`.
  static Jet variable(std::span<const double> point, int index) {
    const int n = static_cast<int>(point.size());
    if (index < 0 || index >= n) {
      throw DimensionError("seed index " + std::to_string(index) + " out of range for " +
                           std::to_string(n) + " variables");
    }
    Jet r(n, point[static_cast<std::size_t>(index)]);
    if constexpr (Order >= 1) r.d1_[static_cast<std::size_t>(index)] = 1.0;
    return r;
  }

  int nvars() const noexcept { return n_; }
  double value() const noexcept { return v_; }

  double d(int i) const requires(Order >= 1) { return d1_[static_cast<std::size_t>(i)]; }
  double d(int i, int j) const requires(Order >= 2) {
    return d2_[static_cast<std::size_t>(detail::sorted_index(i, j))];
  }
  double d(int i, int j, int k) const requires(Order >= 3) {
    return d3_[static_cast<std::size_t>(detail::sorted_index(i, j, k))];
  }

  /// Raw mixed partial named by a multi-index of variable numbers ({} is the value).
  double extract(std::span<const int> multi_index) const {
    const auto order_requested = static_cast<int>(multi_index.size());
    if (order_requested > Order) {
      throw DimensionError("derivative of order " + std::to_string(order_requested) +
                           " requested from a jet of order " + std::to_string(Order));
    }
    for (int i : multi_index) {
      if (i < 0 || i >= n_) throw DimensionError("variable index " + std::to_string(i) + " out of range");
    }
    switch (order_requested) {
      case 0:
        return v_;
      case 1:
        if constexpr (Order >= 1) return d(multi_index[0]);
        break;
      case 2:
        if constexpr (Order >= 2) return d(multi_index[0], multi_index[1]);
        break;
      case 3:
        if constexpr (Order >= 3) return d(multi_index[0], multi_index[1], multi_index[2]);
        break;
      default:
        break;
    }
    return 0.0;
  }
  double extract(std::initializer_list<int> multi_index) const {
    return extract(std::span<const int>(multi_index.begin(), multi_index.size()));
  }

  // Packed storage, sized to nvars().
  std::span<double> d1() noexcept { return {d1_.data(), Order >= 1 ? std::size_t(n_) : 0}; }
  std::span<const double> d1() const noexcept { return {d1_.data(), Order >= 1 ? std::size_t(n_) : 0}; }
  std::span<double> d2_packed() noexcept {
    return {d2_.data(), Order >= 2 ? std::size_t(detail::packed_count2(n_)) : 0};
  }
  std::span<const double> d2_packed() const noexcept {
    return {d2_.data(), Order >= 2 ? std::size_t(detail::packed_count2(n_)) : 0};
  }
  std::span<double> d3_packed() noexcept {
    return {d3_.data(), Order >= 3 ? std::size_t(detail::packed_count3(n_)) : 0};
  }
  std::span<const double> d3_packed() const noexcept {
    return {d3_.data(), Order >= 3 ? std::size_t(detail::packed_count3(n_)) : 0};
  }
  void set_value(double v) noexcept { v_ = v; }

  Jet& operator+=(const Jet& b) {
    check_same(b);
    v_ += b.v_;
    add_scaled_derivatives(b, 1.0);
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    check_same(b);
    v_ -= b.v_;
    add_scaled_derivatives(b, -1.0);
    return *this;
  }
  Jet& operator*=(double c) noexcept {
    v_ *= c;
    for (auto& x : d1()) x *= c;
    for (auto& x : d2_packed()) x *= c;
    for (auto& x : d3_packed()) x *= c;
    return *this;
  }
  Jet& operator+=(double c) noexcept {
    v_ += c;
    return *this;
  }

  void check_same(const Jet& b) const {
    if (n_ != b.n_) {
      throw DimensionError("jet dimension mismatch: " + std::to_string(n_) + " vs " + std::to_string(b.n_));
    }
  }

  /// this += c * b (derivatives only)
  void add_scaled_derivatives(const Jet& b, double c) noexcept {
    auto g = d1();
    auto bg = b.d1();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * bg[i];
    auto h = d2_packed();
    auto bh = b.d2_packed();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += c * bh[i];
    auto t = d3_packed();
    auto bt = b.d3_packed();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += c * bt[i];
  }

 private:
  int n_ = 0;
  double v_ = 0.0;
  std::array<double, kSize1> d1_{};
  std::array<double, kSize2> d2_{};
  std::array<double, kSize3> d3_{};
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

/// Coordinate-variable jet of order 3.
inline Jet3 seed(std::span<const double> point, int index) { return Jet3::variable(point, index); }

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

template <int K>
Jet<K> operator+(Jet<K> a, const Jet<K>& b) {
  a += b;
  return a;
}
template <int K>
Jet<K> operator-(Jet<K> a, const Jet<K>& b) {
  a -= b;
  return a;
}
template <int K>
Jet<K> operator-(Jet<K> a) {
  a *= -1.0;
  return a;
}
template <int K>
Jet<K> operator+(Jet<K> a, double c) {
  a += c;
  return a;
}
template <int K>
Jet<K> operator+(double c, Jet<K> a) {
  a += c;
  return a;
}
template <int K>
Jet<K> operator-(Jet<K> a, double c) {
  a += -c;
  return a;
}
template <int K>
Jet<K> operator-(double c, Jet<K> a) {
  a *= -1.0;
  a += c;
  return a;
}
template <int K>
Jet<K> operator*(Jet<K> a, double c) {
  a *= c;
  return a;
}
template <int K>
Jet<K> operator*(double c, Jet<K> a) {
  a *= c;
  return a;
}

/// Leibniz rule through order K.
template <int K>
Jet<K> operator*(const Jet<K>& a, const Jet<K>& b) {
  a.check_same(b);
  const int n = a.nvars();
  Jet<K> r(n, a.value() * b.value());
  const double av = a.value();
  const double bv = b.value();
  if constexpr (K >= 1) {
    auto ag = a.d1();
    auto bg = b.d1();
    auto rg = r.d1();
    for (int i = 0; i < n; ++i) rg[i] = ag[i] * bv + av * bg[i];
    if constexpr (K >= 2) {
      auto ah = a.d2_packed();
      auto bh = b.d2_packed();
      auto rh = r.d2_packed();
      int p = 0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i, ++p) {
          rh[p] = ah[p] * bv + ag[i] * bg[j] + ag[j] * bg[i] + av * bh[p];
        }
      }
      if constexpr (K >= 3) {
        auto at = a.d3_packed();
        auto bt = b.d3_packed();
        auto rt = r.d3_packed();
        int q = 0;
        for (int k = 0; k < n; ++k) {
          for (int j = 0; j <= k; ++j) {
            for (int i = 0; i <= j; ++i, ++q) {
              const int ij = detail::packed_index(i, j);
              const int ik = detail::packed_index(i, k);
              const int jk = detail::packed_index(j, k);
              rt[q] = at[q] * bv + ah[ij] * bg[k] + ah[ik] * bg[j] + ah[jk] * bg[i] + ag[i] * bh[jk] +
                      ag[j] * bh[ik] + ag[k] * bh[ij] + av * bt[q];
            }
          }
        }
      }
    }
  }
  return r;
}

/// h(u) for a univariate h given its derivatives h0..h3 at u.value() (Faa di Bruno through order 3).
template <int K>
Jet<K> compose(const Jet<K>& u, double h0, double h1, double h2, double h3) {
  const int n = u.nvars();
  Jet<K> r(n, h0);
  if constexpr (K >= 1) {
    auto ug = u.d1();
    auto rg = r.d1();
    for (int i = 0; i < n; ++i) rg[i] = h1 * ug[i];
    if constexpr (K >= 2) {
      auto uh = u.d2_packed();
      auto rh = r.d2_packed();
      int p = 0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i, ++p) rh[p] = h2 * ug[i] * ug[j] + h1 * uh[p];
      }
      if constexpr (K >= 3) {
        auto ut = u.d3_packed();
        auto rt = r.d3_packed();
        int q = 0;
        for (int k = 0; k < n; ++k) {
          for (int j = 0; j <= k; ++j) {
            for (int i = 0; i <= j; ++i, ++q) {
              const int ij = detail::packed_index(i, j);
              const int ik = detail::packed_index(i, k);
              const int jk = detail::packed_index(j, k);
              rt[q] = h3 * ug[i] * ug[j] * ug[k] + h2 * (uh[ij] * ug[k] + uh[ik] * ug[j] + uh[jk] * ug[i]) +
                      h1 * ut[q];
            }
          }
        }
      }
    }
  } else {
    (void)h1;
  }
  (void)h2;
  (void)h3;
  return r;
}

template <int K>
Jet<K> reciprocal(const Jet<K>& b) {
  const double x = b.value();
  if (x == 0.0) throw DomainError("division by zero");
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return compose(b, inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2);
}

template <int K>
Jet<K> operator/(const Jet<K>& a, const Jet<K>& b) {
  a.check_same(b);
  return a * reciprocal(b);
}
template <int K>
Jet<K> operator/(Jet<K> a, double c) {
  if (c == 0.0) throw DomainError("division by zero");
  a *= 1.0 / c;
  return a;
}
template <int K>
Jet<K> operator/(double c, const Jet<K>& b) {
  return c * reciprocal(b);
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

template <int K>
Jet<K> exp(const Jet<K>& u) {
  const double e = std::exp(u.value());
  return compose(u, e, e, e, e);
}

template <int K>
Jet<K> log(const Jet<K>& u) {
  const double x = u.value();
  if (!(x > 0.0)) throw DomainError("ln of non-positive value " + detail::format_value(x));
  const double inv = 1.0 / x;
  return compose(u, std::log(x), inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int K>
Jet<K> sin(const Jet<K>& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return compose(u, s, c, -s, -c);
}

template <int K>
Jet<K> cos(const Jet<K>& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return compose(u, c, -s, -c, s);
}

template <int K>
Jet<K> sqrt(const Jet<K>& u) {
  const double x = u.value();
  if (!(x > 0.0)) throw DomainError("sqrt of non-positive value " + detail::format_value(x));
  const double r = std::sqrt(x);
  return compose(u, r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x));
}

/// u^c for a constant exponent. Non-integer exponents need a positive base.
template <int K>
Jet<K> pow(const Jet<K>& u, double c) {
  const double x = u.value();
  const bool integral = c == std::floor(c);
  if (!integral && !(x > 0.0)) {
    throw DomainError("non-integer power of non-positive value " + detail::format_value(x));
  }
  if (integral && c < 0.0 && x == 0.0) throw DomainError("negative power of zero");
  auto p = [&](double e) { return e == 0.0 ? 1.0 : std::pow(x, e); };
  return compose(u, p(c), c * p(c - 1.0), c * (c - 1.0) * p(c - 2.0), c * (c - 1.0) * (c - 2.0) * p(c - 3.0));
}

// ---------------------------------------------------------------------------
// Order changes
// ---------------------------------------------------------------------------

/// Drop derivative stacks above order K2.
template <int K2, int K>
Jet<K2> truncate(const Jet<K>& a) {
  static_assert(K2 <= K, "truncate cannot raise the order");
  if constexpr (K2 == K) {
    return a;
  } else {
    Jet<K2> r(a.nvars(), a.value());
    std::copy(a.d1().begin(), a.d1().begin() + static_cast<long>(r.d1().size()), r.d1().begin());
    std::copy(a.d2_packed().begin(), a.d2_packed().begin() + static_cast<long>(r.d2_packed().size()),
              r.d2_packed().begin());
    return r;
  }
}

/// The jet of the partial derivative d/dx_i, one order lower.
template <int K>
Jet<K - 1> partial(const Jet<K>& a, int i) {
  static_assert(K >= 1, "cannot differentiate an order-0 jet");
  const int n = a.nvars();
  if (i < 0 || i >= n) throw DimensionError("partial index " + std::to_string(i) + " out of range");
  Jet<K - 1> r(n, a.d(i));
  if constexpr (K >= 2) {
    auto rg = r.d1();
    for (int j = 0; j < n; ++j) rg[j] = a.d(i, j);
    if constexpr (K >= 3) {
      auto rh = r.d2_packed();
      int p = 0;
      for (int k = 0; k < n; ++k) {
        for (int j = 0; j <= k; ++j, ++p) rh[p] = a.d(i, j, k);
      }
    }
  }
  return r;
}

}  // namespace etasol
