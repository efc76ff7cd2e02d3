#include "etasol/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace etasol {

namespace {

std::string point_text(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

template <int K, int K2>
std::vector<Jet<K2>> lower_order(const std::vector<Jet<K>>& v) {
  return truncate_all<K, K2>(std::span<const Jet<K>>(v));
}

// Gauss-Jordan inverse of a symmetric positive definite jet matrix; no
// pivoting is needed for SPD input. The result is mirrored from its upper triangle.
std::vector<Jet3> invert_spd(const std::vector<Jet3>& a, int n) {
  std::vector<Jet3> m = a;
  std::vector<Jet3> inv(std::size_t(n * n), Jet3(n, 0.0));
  for (int i = 0; i < n; ++i) inv[std::size_t(i * n + i)] = Jet3(n, 1.0);
  auto at = [n](std::vector<Jet3>& v, int i, int j) -> Jet3& { return v[std::size_t(i * n + j)]; };
  for (int c = 0; c < n; ++c) {
    const Jet3 pivot_inv = reciprocal(at(m, c, c));
    for (int j = 0; j < n; ++j) {
      at(m, c, j) = at(m, c, j) * pivot_inv;
      at(inv, c, j) = at(inv, c, j) * pivot_inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet3 factor = at(m, r, c);
      for (int j = 0; j < n; ++j) {
        at(m, r, j) -= factor * at(m, c, j);
        at(inv, r, j) -= factor * at(inv, c, j);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) at(inv, i, j) = at(inv, j, i);
  }
  return inv;
}

}  // namespace

LocalGeometry::LocalGeometry(const ManifoldSpec& manifold, std::span<const double> point)
    : n_(manifold.dim()), point_(point.begin(), point.end()) {
  if (static_cast<int>(point.size()) != n_) {
    throw DimensionError("point has " + std::to_string(point.size()) + " coordinates, manifold '" +
                         manifold.name() + "' has dimension " + std::to_string(n_));
  }
  const int n = n_;
  const auto g3 = manifold.metric_jets(point);

  Eigen::MatrixXd gv(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) gv(i, j) = g3[idx(i, j)].value();
  }
  if (!gv.allFinite()) {
    throw SingularMetricError("metric is not finite at " + point_text(point), point_, INFINITY);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gv, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw SingularMetricError("metric is not positive definite at " + point_text(point) +
                                  " (smallest eigenvalue " + detail::format_value(lo) + ")",
                              point_, INFINITY);
  }
  condition_ = hi / lo;
  if (condition_ > kMaxConditionNumber) {
    throw SingularMetricError("metric is numerically singular at " + point_text(point) + " (condition number " +
                                  detail::format_value(condition_) + ")",
                              point_, condition_);
  }

  const auto ginv3 = invert_spd(g3, n);
  std::get<3>(g_) = g3;
  std::get<2>(g_) = lower_order<3, 2>(g3);
  std::get<1>(g_) = lower_order<3, 1>(g3);
  std::get<0>(g_) = lower_order<3, 0>(g3);
  std::get<3>(g_inv_) = ginv3;
  std::get<2>(g_inv_) = lower_order<3, 2>(ginv3);
  std::get<1>(g_inv_) = lower_order<3, 1>(ginv3);
  std::get<0>(g_inv_) = lower_order<3, 0>(ginv3);

  // d_k g_ij
  std::vector<Jet2> dg2(std::size_t(n * n * n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        dg2[idx(k, i, j)] = partial(g3[idx(i, j)], k);
        dg2[idx(k, j, i)] = dg2[idx(k, i, j)];
      }
    }
  }

  // Christoffel symbols of the first kind, then raised: Gamma^k_ij = g^kl Gamma_ijl.
  const auto& ginv2 = std::get<2>(g_inv_);
  std::vector<Jet2> first(std::size_t(n * n * n));  // (i, j, l)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        Jet2 s = dg2[idx(i, j, l)] + dg2[idx(j, i, l)] - dg2[idx(l, i, j)];
        s *= 0.5;
        first[idx(i, j, l)] = s;
        first[idx(j, i, l)] = std::move(s);
      }
    }
  }
  std::vector<Jet2> gamma2(std::size_t(n * n * n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Jet2 acc(n, 0.0);
        for (int l = 0; l < n; ++l) acc += ginv2[idx(k, l)] * first[idx(i, j, l)];
        gamma2[idx(k, i, j)] = acc;
        gamma2[idx(k, j, i)] = std::move(acc);
      }
    }
  }
  std::get<0>(dg_) = lower_order<2, 0>(dg2);
  std::get<1>(dg_) = lower_order<2, 1>(dg2);
  std::get<2>(dg_) = std::move(dg2);
  std::get<0>(gamma_) = lower_order<2, 0>(gamma2);
  std::get<1>(gamma_) = lower_order<2, 1>(gamma2);
  std::get<2>(gamma_) = std::move(gamma2);

  // R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik, computed for i < j.
  const auto& gam2 = std::get<2>(gamma_);
  const auto& gam1 = std::get<1>(gamma_);
  riemann_.assign(std::size_t(n * n * n * n), Jet1(n, 0.0));
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          Jet1 acc = partial(gam2[idx(l, j, k)], i) - partial(gam2[idx(l, i, k)], j);
          for (int m = 0; m < n; ++m) {
            acc += gam1[idx(l, i, m)] * gam1[idx(m, j, k)];
            acc -= gam1[idx(l, j, m)] * gam1[idx(m, i, k)];
          }
          riemann_[idx(l, j, i, k)] = -acc;
          riemann_[idx(l, i, j, k)] = std::move(acc);
        }
      }
    }
  }

  ricci_.assign(std::size_t(n * n), Jet1(n, 0.0));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      Jet1 acc(n, 0.0);
      for (int i = 0; i < n; ++i) acc += riemann_[idx(i, i, j, k)];
      ricci_[idx(j, k)] = std::move(acc);
    }
  }
  scal_ = trace<1>(*this, ricci_);
}

TensorValue LocalGeometry::metric() const { return values_of<0>(g<0>(), 0, 2, n_, point_); }

TensorValue LocalGeometry::metric_inverse() const { return values_of<0>(g_inv<0>(), 2, 0, n_, point_); }

TensorValue LocalGeometry::christoffel() const { return values_of<0>(gamma<0>(), 1, 2, n_, point_); }

TensorValue LocalGeometry::riemann() const { return values_of<1>(riemann_, 1, 3, n_, point_); }

TensorValue LocalGeometry::ricci() const { return values_of<1>(ricci_, 0, 2, n_, point_); }

TensorValue LocalGeometry::nabla_ricci() const {
  const int n = n_;
  const auto& gam = gamma<0>();
  TensorValue t = TensorValue::zeros(0, 3, n, point_);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = ricci_[idx(i, j)].d(k);
        for (int m = 0; m < n; ++m) {
          v -= gam[idx(m, k, i)].value() * ricci_[idx(m, j)].value();
          v -= gam[idx(m, k, j)].value() * ricci_[idx(i, m)].value();
        }
        t(k, i, j) = v;
      }
    }
  }
  return t;
}

std::vector<double> LocalGeometry::d_scal() const {
  return {scal_.d1().begin(), scal_.d1().end()};
}

std::vector<double> LocalGeometry::div_ricci() const {
  const int n = n_;
  const TensorValue ns = nabla_ricci();
  const auto& ginv = g_inv<0>();
  std::vector<double> r(std::size_t(n), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) r[std::size_t(j)] += ginv[idx(i, k)].value() * ns(i, k, j);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

TensorValue christoffel_at(const ManifoldSpec& m, std::span<const double> p) {
  return LocalGeometry(m, p).christoffel();
}

TensorValue riemann_at(const ManifoldSpec& m, std::span<const double> p) { return LocalGeometry(m, p).riemann(); }

RicciAt ricci_at(const ManifoldSpec& m, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  return {geo.ricci(), geo.scal()};
}

ScalarOps scalar_ops_at(const ManifoldSpec& m, const Expr& f, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const int n = geo.dim();
  const Jet2 fj = m.compile(f).eval_jet<2>(p);
  std::vector<Jet<0>> df;
  for (int k = 0; k < n; ++k) df.push_back(Jet<0>(n, fj.d(k)));
  ScalarOps out;
  for (const auto& x : raise_index<0>(geo, df)) out.gradient.push_back(x.value());
  const auto h = hessian<2>(geo, fj);
  out.hessian = values_of<0>(h, 0, 2, n, p);
  out.laplacian = trace<0>(geo, h).value();
  return out;
}

TensorValue lie_metric_at(const ManifoldSpec& m, std::span<const Expr> field, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const int n = geo.dim();
  if (static_cast<int>(field.size()) != n) throw DimensionError("vector field needs " + std::to_string(n) + " components");
  std::vector<Jet2> X;
  for (const auto& e : field) X.push_back(m.compile(e).eval_jet<2>(p));
  return values_of<1>(lie_derivative_metric<2>(geo, X), 0, 2, n, p);
}

std::vector<double> divergence_at(const ManifoldSpec& m, const FieldSpec& field, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  const int n = geo.dim();
  const std::size_t expected = field.kind == FieldKind::Sym2 ? std::size_t(n * n) : std::size_t(n);
  if (field.components.size() != expected) {
    throw DimensionError("field needs " + std::to_string(expected) + " components, got " +
                         std::to_string(field.components.size()));
  }
  std::vector<Jet1> comps;
  for (const auto& e : field.components) comps.push_back(m.compile(e).eval_jet<1>(p));
  switch (field.kind) {
    case FieldKind::Vector:
      return {divergence_vector<1>(geo, comps).value()};
    case FieldKind::OneForm:
      return {divergence_oneform<1>(geo, comps).value()};
    case FieldKind::Sym2: {
      std::vector<double> r;
      for (const auto& x : divergence_sym2<1>(geo, comps)) r.push_back(x.value());
      return r;
    }
  }
  return {};
}

NablaRicci nabla_ricci_at(const ManifoldSpec& m, std::span<const double> p) {
  const LocalGeometry geo(m, p);
  return {geo.nabla_ricci(), geo.d_scal()};
}

double frame_orthonormality_defect(const ManifoldSpec& m, std::span<const double> p) {
  const int n = m.dim();
  const auto e = m.frame_values(p);
  const auto g = m.metric_jets(p);
  double defect = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s += e[std::size_t(a * n + i)] * g[std::size_t(i * n + j)].value() * e[std::size_t(b * n + j)];
      }
      defect = std::max(defect, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return defect;
}

TensorValue frame_components(const ManifoldSpec& m, const TensorValue& t, std::span<const double> p) {
  const int n = m.dim();
  if (t.dim != n) throw DimensionError("tensor dimension does not match the manifold");
  constexpr double kFrameTolerance = 1e-10;
  const double defect = frame_orthonormality_defect(m, p);
  if (!(defect <= kFrameTolerance)) {
    throw PreconditionError("frame of '" + m.name() + "' is not orthonormal at " + point_text(p) + " (defect " +
                            detail::format_value(defect) + ")");
  }
  const auto e = m.frame_values(p);
  const auto g = m.metric_jets(p);
  // down[a][i] = E_a^i; up[a][i] = g_ij E_a^j
  std::vector<double> down = e;
  std::vector<double> up(std::size_t(n * n), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) up[std::size_t(a * n + i)] += g[std::size_t(i * n + j)].value() * e[std::size_t(a * n + j)];
    }
  }
  TensorValue cur = t;
  const int rank = t.rank();
  std::size_t stride = 1;
  for (int s = rank - 1; s >= 0; --s) {
    const auto& mat = s < t.contravariant ? up : down;
    TensorValue next = cur;
    const std::size_t block = stride * std::size_t(n);
    for (std::size_t base = 0; base < cur.data.size(); base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (int a = 0; a < n; ++a) {
          double v = 0.0;
          for (int i = 0; i < n; ++i) v += mat[std::size_t(a * n + i)] * cur.data[base + std::size_t(i) * stride + inner];
          next.data[base + std::size_t(a) * stride + inner] = v;
        }
      }
    }
    cur = std::move(next);
    stride *= std::size_t(n);
  }
  cur.point.assign(p.begin(), p.end());
  return cur;
}

double squared_norm(const LocalGeometry& geo, const TensorValue& t) {
  const int n = geo.dim();
  if (t.rank() != 2 || t.covariant != 2 || t.dim != n) throw DimensionError("squared norm needs a covariant 2-tensor");
  const auto& gi = geo.g_inv<0>();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) s += gi[geo.idx(i, k)].value() * gi[geo.idx(j, l)].value() * t(i, j) * t(k, l);
      }
    }
  }
  return s;
}

double squared_norm_at(const ManifoldSpec& m, const TensorValue& t, std::span<const double> p) {
  return squared_norm(LocalGeometry(m, p), t);
}

}  // namespace etasol
