#pragma once

// Pointwise Riemannian geometry of a chart with a metric.
//
// Conventions:
//   Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,  R(d_i,d_j)d_k = R^l_{ijk} d_l
//   S(X,Y) = trace(Z -> R(Z,X)Y), i.e. S_{jk} = R^i_{ijk};  scal = g^{jk} S_{jk}
//   Hess f = nabla df,  Laplacian = div grad.
// All traces are taken in coordinates with g^{ij}; a declared frame is only
// used to report components.

#include <span>
#include <tuple>
#include <vector>

#include "etasol/jet.hpp"
#include "etasol/manifold.hpp"
#include "etasol/tensor.hpp"

namespace etasol {

/// Metric inversion fails above this condition number.
inline constexpr double kMaxConditionNumber = 1e12;

/// Metric, inverse, connection and curvature at one point, carried as jets so
/// that derivatives of every quantity are exact up to the available order:
/// g and g^{-1} to order 3, Christoffel symbols to order 2, curvature to order 1.
class LocalGeometry {
 public:
  LocalGeometry(const ManifoldSpec& manifold, std::span<const double> point);

  int dim() const noexcept { return n_; }
  const std::vector<double>& point() const noexcept { return point_; }
  double condition() const noexcept { return condition_; }

  std::size_t idx(int i, int j) const noexcept { return std::size_t(i * n_ + j); }
  std::size_t idx(int i, int j, int k) const noexcept { return std::size_t((i * n_ + j) * n_ + k); }
  std::size_t idx(int i, int j, int k, int l) const noexcept {
    return std::size_t(((i * n_ + j) * n_ + k) * n_ + l);
  }

  /// g_{ij} truncated to order K (K in [0, 3]).
  template <int K>
  const std::vector<Jet<K>>& g() const {
    return std::get<K>(g_);
  }
  /// g^{ij} truncated to order K (K in [0, 3]).
  template <int K>
  const std::vector<Jet<K>>& g_inv() const {
    return std::get<K>(g_inv_);
  }
  /// d_k g_{ij} at index (k, i, j), order K in [0, 2].
  template <int K>
  const std::vector<Jet<K>>& dg() const {
    return std::get<K>(dg_);
  }
  /// Gamma^k_{ij} at index (k, i, j), order K in [0, 2].
  template <int K>
  const std::vector<Jet<K>>& gamma() const {
    return std::get<K>(gamma_);
  }
  /// R^l_{ijk} at index (l, i, j, k).
  const std::vector<Jet1>& riemann_jets() const noexcept { return riemann_; }
  /// S_{jk} at index (j, k).
  const std::vector<Jet1>& ricci_jets() const noexcept { return ricci_; }
  const Jet1& scal_jet() const noexcept { return scal_; }

  TensorValue metric() const;
  TensorValue metric_inverse() const;
  TensorValue christoffel() const;
  TensorValue riemann() const;
  TensorValue ricci() const;
  double scal() const noexcept { return scal_.value(); }
  /// (nabla S)_{kij} = d_k S_{ij} - Gamma^m_{ki} S_{mj} - Gamma^m_{kj} S_{im}
  TensorValue nabla_ricci() const;
  /// d_k scal
  std::vector<double> d_scal() const;
  /// (div S)_j = g^{ik} (nabla S)_{ikj}
  std::vector<double> div_ricci() const;

 private:
  template <int K>
  using Jets = std::vector<Jet<K>>;

  int n_;
  std::vector<double> point_;
  double condition_ = 1.0;
  std::tuple<Jets<0>, Jets<1>, Jets<2>, Jets<3>> g_;
  std::tuple<Jets<0>, Jets<1>, Jets<2>, Jets<3>> g_inv_;
  std::tuple<Jets<0>, Jets<1>, Jets<2>> dg_;
  std::tuple<Jets<0>, Jets<1>, Jets<2>> gamma_;
  Jets<1> riemann_;
  Jets<1> ricci_;
  Jet1 scal_;
};

// ---------------------------------------------------------------------------
// Jet-level field operations. Input fields of order K give results of order
// K-1 (one derivative) or K-2 (two derivatives).
// ---------------------------------------------------------------------------

template <int K, int K2>
std::vector<Jet<K2>> truncate_all(std::span<const Jet<K>> v) {
  std::vector<Jet<K2>> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(truncate<K2>(x));
  return r;
}

/// (nabla_i X^k) at index (i, k).
template <int K>
std::vector<Jet<K - 1>> covariant_derivative_vector(const LocalGeometry& geo, std::span<const Jet<K>> X) {
  const int n = geo.dim();
  const auto& gam = geo.gamma<K - 1>();
  const auto x = truncate_all<K, K - 1>(X);
  std::vector<Jet<K - 1>> r;
  r.reserve(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Jet<K - 1> acc = partial(X[std::size_t(k)], i);
      for (int m = 0; m < n; ++m) acc += gam[geo.idx(k, i, m)] * x[std::size_t(m)];
      r.push_back(std::move(acc));
    }
  }
  return r;
}

/// (nabla_i w_j) at index (i, j).
template <int K>
std::vector<Jet<K - 1>> covariant_derivative_oneform(const LocalGeometry& geo, std::span<const Jet<K>> w) {
  const int n = geo.dim();
  const auto& gam = geo.gamma<K - 1>();
  const auto wt = truncate_all<K, K - 1>(w);
  std::vector<Jet<K - 1>> r;
  r.reserve(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet<K - 1> acc = partial(w[std::size_t(j)], i);
      for (int m = 0; m < n; ++m) acc -= gam[geo.idx(m, i, j)] * wt[std::size_t(m)];
      r.push_back(std::move(acc));
    }
  }
  return r;
}

/// div X = nabla_i X^i
template <int K>
Jet<K - 1> divergence_vector(const LocalGeometry& geo, std::span<const Jet<K>> X) {
  const int n = geo.dim();
  const auto& gam = geo.gamma<K - 1>();
  Jet<K - 1> acc(n, 0.0);
  for (int i = 0; i < n; ++i) {
    acc += partial(X[std::size_t(i)], i);
    for (int k = 0; k < n; ++k) acc += gam[geo.idx(i, i, k)] * truncate<K - 1>(X[std::size_t(k)]);
  }
  return acc;
}

/// div w = g^{ij} nabla_i w_j
template <int K>
Jet<K - 1> divergence_oneform(const LocalGeometry& geo, std::span<const Jet<K>> w) {
  const int n = geo.dim();
  const auto nw = covariant_derivative_oneform<K>(geo, w);
  const auto& ginv = geo.g_inv<K - 1>();
  Jet<K - 1> acc(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) acc += ginv[geo.idx(i, j)] * nw[geo.idx(i, j)];
  }
  return acc;
}

/// (div T)_j = g^{ik} nabla_i T_{kj} for a covariant 2-tensor T at index (k, j).
template <int K>
std::vector<Jet<K - 1>> divergence_sym2(const LocalGeometry& geo, std::span<const Jet<K>> T) {
  const int n = geo.dim();
  const auto& gam = geo.gamma<K - 1>();
  const auto& ginv = geo.g_inv<K - 1>();
  const auto t = truncate_all<K, K - 1>(T);
  std::vector<Jet<K - 1>> r;
  r.reserve(std::size_t(n));
  for (int j = 0; j < n; ++j) {
    Jet<K - 1> acc(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        Jet<K - 1> nabla = partial(T[geo.idx(k, j)], i);
        for (int m = 0; m < n; ++m) {
          nabla -= gam[geo.idx(m, i, k)] * t[geo.idx(m, j)];
          nabla -= gam[geo.idx(m, i, j)] * t[geo.idx(k, m)];
        }
        acc += ginv[geo.idx(i, k)] * nabla;
      }
    }
    r.push_back(std::move(acc));
  }
  return r;
}

/// (L_X g)_{ij} = X^k d_k g_{ij} + g_{kj} d_i X^k + g_{ik} d_j X^k
template <int K>
std::vector<Jet<K - 1>> lie_derivative_metric(const LocalGeometry& geo, std::span<const Jet<K>> X) {
  const int n = geo.dim();
  const auto& dg = geo.dg<K - 1>();
  const auto& g = geo.g<K - 1>();
  const auto x = truncate_all<K, K - 1>(X);
  std::vector<Jet<K - 1>> dx;  // (i, k) = d_i X^k
  dx.reserve(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) dx.push_back(partial(X[std::size_t(k)], i));
  }
  std::vector<Jet<K - 1>> r;
  r.reserve(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet<K - 1> acc(n, 0.0);
      for (int k = 0; k < n; ++k) {
        acc += x[std::size_t(k)] * dg[geo.idx(k, i, j)];
        acc += g[geo.idx(k, j)] * dx[geo.idx(i, k)];
        acc += g[geo.idx(i, k)] * dx[geo.idx(j, k)];
      }
      r.push_back(std::move(acc));
    }
  }
  return r;
}

/// Hess_{ij} f = d_i d_j f - Gamma^k_{ij} d_k f
template <int K>
std::vector<Jet<K - 2>> hessian(const LocalGeometry& geo, const Jet<K>& f) {
  const int n = geo.dim();
  const auto& gam = geo.gamma<K - 2>();
  std::vector<Jet<K - 1>> df;
  for (int k = 0; k < n; ++k) df.push_back(partial(f, k));
  std::vector<Jet<K - 2>> r(std::size_t(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Jet<K - 2> acc = partial(df[std::size_t(i)], j);
      for (int k = 0; k < n; ++k) acc -= gam[geo.idx(k, i, j)] * truncate<K - 2>(df[std::size_t(k)]);
      r[geo.idx(i, j)] = acc;
      r[geo.idx(j, i)] = std::move(acc);
    }
  }
  return r;
}

/// g^{ij} w_j
template <int K>
std::vector<Jet<K>> raise_index(const LocalGeometry& geo, std::span<const Jet<K>> w) {
  const int n = geo.dim();
  const auto& ginv = geo.g_inv<K>();
  std::vector<Jet<K>> r;
  for (int i = 0; i < n; ++i) {
    Jet<K> acc(n, 0.0);
    for (int j = 0; j < n; ++j) acc += ginv[geo.idx(i, j)] * w[std::size_t(j)];
    r.push_back(std::move(acc));
  }
  return r;
}

/// g_{ij} X^j
template <int K>
std::vector<Jet<K>> lower_index(const LocalGeometry& geo, std::span<const Jet<K>> X) {
  const int n = geo.dim();
  const auto& g = geo.g<K>();
  std::vector<Jet<K>> r;
  for (int i = 0; i < n; ++i) {
    Jet<K> acc(n, 0.0);
    for (int j = 0; j < n; ++j) acc += g[geo.idx(i, j)] * X[std::size_t(j)];
    r.push_back(std::move(acc));
  }
  return r;
}

/// g^{ij} T_{ij}
template <int K>
Jet<K> trace(const LocalGeometry& geo, std::span<const Jet<K>> T) {
  const int n = geo.dim();
  const auto& ginv = geo.g_inv<K>();
  Jet<K> acc(n, 0.0);
  for (std::size_t a = 0; a < T.size(); ++a) acc += ginv[a] * T[a];
  return acc;
}

template <int K>
TensorValue values_of(std::span<const Jet<K>> v, int up, int down, int n, std::span<const double> at) {
  TensorValue t = TensorValue::zeros(up, down, n, at);
  for (std::size_t a = 0; a < v.size(); ++a) t.data[a] = v[a].value();
  return t;
}

// ---------------------------------------------------------------------------
// Per-point operations on a manifold spec.
// ---------------------------------------------------------------------------

/// Gamma^k_{ij} as a (1,2) tensor indexed (k, i, j).
TensorValue christoffel_at(const ManifoldSpec& m, std::span<const double> p);

/// R^l_{ijk} as a (1,3) tensor indexed (l, i, j, k).
TensorValue riemann_at(const ManifoldSpec& m, std::span<const double> p);

struct RicciAt {
  TensorValue ricci;
  double scal = 0.0;
};
RicciAt ricci_at(const ManifoldSpec& m, std::span<const double> p);

struct ScalarOps {
  std::vector<double> gradient;  // grad^i = g^{ij} d_j f
  TensorValue hessian;
  double laplacian = 0.0;
};
ScalarOps scalar_ops_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p);

/// L_X g for a vector field given by contravariant component expressions.
TensorValue lie_metric_at(const ManifoldSpec& m, std::span<const Expr> field, std::span<const double> p);

enum class FieldKind { Vector, OneForm, Sym2 };

struct FieldSpec {
  FieldKind kind = FieldKind::Vector;
  std::vector<Expr> components;  // n entries, or n*n row-major for Sym2
};

/// Scalar divergence (one entry) for vector fields and one-forms, the
/// divergence one-form (n entries) for covariant 2-tensors.
std::vector<double> divergence_at(const ManifoldSpec& m, const FieldSpec& field, std::span<const double> p);

struct NablaRicci {
  TensorValue nabla_ricci;  // (k, i, j)
  std::vector<double> d_scal;
};
NablaRicci nabla_ricci_at(const ManifoldSpec& m, std::span<const double> p);

/// Components of T in the declared orthonormal frame: covariant slots are
/// contracted with E_a^i, contravariant slots with the coframe g_{ij} E_a^j.
TensorValue frame_components(const ManifoldSpec& m, const TensorValue& t, std::span<const double> p);

/// |T|^2 = g^{ik} g^{jl} T_{ij} T_{kl} for a covariant 2-tensor.
double squared_norm_at(const ManifoldSpec& m, const TensorValue& t, std::span<const double> p);
double squared_norm(const LocalGeometry& geo, const TensorValue& t);

/// Largest |E g E^T - I| entry for the declared frame at p.
double frame_orthonormality_defect(const ManifoldSpec& m, std::span<const double> p);

}  // namespace etasol
